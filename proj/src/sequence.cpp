#include "lpdp/sequence.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace lpdp {

namespace {

constexpr std::array<Nucleotide, 4> kAllNucleotides = {Nucleotide::A, Nucleotide::C,
                                                       Nucleotide::G, Nucleotide::T};

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

char to_char(Nucleotide n) {
    switch (n) {
        case Nucleotide::A: return 'A';
        case Nucleotide::C: return 'C';
        case Nucleotide::G: return 'G';
        case Nucleotide::T: return 'T';
    }
    fail("invalid nucleotide value");
}

Nucleotide nucleotide_from_char(char c) {
    switch (c) {
        case 'A': return Nucleotide::A;
        case 'C': return Nucleotide::C;
        case 'G': return Nucleotide::G;
        case 'T': return Nucleotide::T;
        default: fail(std::string("invalid nucleotide character '") + c + "'");
    }
}

std::string_view to_string(EditKind k) {
    switch (k) {
        case EditKind::Sub: return "sub";
        case EditKind::Ins: return "ins";
        case EditKind::Del: return "del";
    }
    fail("invalid edit kind value");
}

EditAction make_sub(std::size_t site, Nucleotide token) { return {site, EditKind::Sub, token}; }
EditAction make_ins(std::size_t site, Nucleotide token) { return {site, EditKind::Ins, token}; }
EditAction make_del(std::size_t site) { return {site, EditKind::Del, Nucleotide::A}; }

std::string to_string(const EditAction& a) {
    std::string out{to_string(a.kind)};
    out += '@';
    out += std::to_string(a.site);
    if (a.kind != EditKind::Del) {
        out += ':';
        out += to_char(a.token);
    }
    return out;
}

EditAction parse_action(std::string_view text) {
    const auto at = text.find('@');
    if (at == std::string_view::npos) fail("action text missing '@': " + std::string(text));
    const std::string_view kind_sv = text.substr(0, at);
    std::string_view rest = text.substr(at + 1);

    std::string_view token_sv;
    const auto colon = rest.find(':');
    if (colon != std::string_view::npos) {
        token_sv = rest.substr(colon + 1);
        rest = rest.substr(0, colon);
    }

    std::size_t site = 0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), site);
    if (ec != std::errc{} || ptr != rest.data() + rest.size()) {
        fail("invalid action site: " + std::string(text));
    }

    if (kind_sv == "del") {
        if (!token_sv.empty()) fail("deletion takes no token: " + std::string(text));
        return make_del(site);
    }
    if (token_sv.size() != 1) fail("action missing token: " + std::string(text));
    const Nucleotide tok = nucleotide_from_char(token_sv[0]);
    if (kind_sv == "sub") return make_sub(site, tok);
    if (kind_sv == "ins") return make_ins(site, tok);
    fail("unknown edit kind: " + std::string(text));
}

Sequence::Sequence(std::string bases) : bases_(std::move(bases)) {
    for (char c : bases_) {
        nucleotide_from_char(c);
    }
}

Nucleotide Sequence::at(std::size_t i) const {
    if (i >= bases_.size()) fail("sequence index out of range");
    return nucleotide_from_char(bases_[i]);
}

void validate_bounds(const LengthBounds& b) {
    if (b.min_len < 1 || b.min_len > b.max_len) {
        fail("length bounds require 1 <= min_len <= max_len");
    }
}

void validate_sequence(const Sequence& x, const ActionSpace& space) {
    validate_bounds(space.bounds);
    if (x.length() < space.bounds.min_len || x.length() > space.bounds.max_len) {
        fail("sequence length " + std::to_string(x.length()) + " outside bounds [" +
             std::to_string(space.bounds.min_len) + ", " + std::to_string(space.bounds.max_len) +
             "]");
    }
    if (space.frozen_prefix + space.frozen_suffix > x.length()) {
        fail("frozen prefix+suffix exceed sequence length");
    }
}

namespace {

struct SiteWindow {
    // editable half-open site ranges for each action family
    std::size_t sub_lo, sub_hi;  // sub/del sites in [sub_lo, sub_hi)
    std::size_t ins_lo, ins_hi;  // insertion slots in [ins_lo, ins_hi]
};

SiteWindow editable_window(const Sequence& x, const ActionSpace& space) {
    const std::size_t len = x.length();
    SiteWindow w{};
    w.sub_lo = space.frozen_prefix;
    w.sub_hi = len - space.frozen_suffix;
    w.ins_lo = space.frozen_prefix;
    w.ins_hi = len - space.frozen_suffix;  // inclusive slot
    return w;
}

}  // namespace

std::vector<EditAction> enumerate_actions(const Sequence& x, const ActionSpace& space) {
    validate_sequence(x, space);
    const std::size_t len = x.length();
    const bool may_insert = len < space.bounds.max_len;
    const bool may_delete = len > space.bounds.min_len;
    const SiteWindow w = editable_window(x, space);

    std::vector<EditAction> out;
    out.reserve(5 * len + 4);
    for (std::size_t s = 0; s <= len; ++s) {
        const bool in_edit = s >= w.sub_lo && s < w.sub_hi;
        if (s < len && in_edit) {
            const Nucleotide cur = x.at(s);
            for (Nucleotide v : kAllNucleotides) {
                if (v != cur) out.push_back(make_sub(s, v));
            }
        }
        if (may_insert && s >= w.ins_lo && s <= w.ins_hi) {
            for (Nucleotide v : kAllNucleotides) {
                out.push_back(make_ins(s, v));
            }
        }
        if (may_delete && s < len && in_edit) {
            out.push_back(make_del(s));
        }
    }
    return out;
}

std::vector<EditAction> enumerate_actions(const Sequence& x, const LengthBounds& bounds) {
    return enumerate_actions(x, ActionSpace{bounds});
}

bool is_structurally_valid(const Sequence& x, const EditAction& a) {
    const std::size_t len = x.length();
    switch (a.kind) {
        case EditKind::Sub:
            return a.site < len && a.token != x.at(a.site);
        case EditKind::Ins:
            return a.site <= len;
        case EditKind::Del:
            return a.site < len;
    }
    return false;
}

bool is_valid_action(const Sequence& x, const EditAction& a, const ActionSpace& space) {
    if (!is_structurally_valid(x, a)) return false;
    const std::size_t len = x.length();
    if (a.kind == EditKind::Ins && len >= space.bounds.max_len) return false;
    if (a.kind == EditKind::Del && len <= space.bounds.min_len) return false;
    const SiteWindow w = editable_window(x, space);
    if (a.kind == EditKind::Ins) return a.site >= w.ins_lo && a.site <= w.ins_hi;
    return a.site >= w.sub_lo && a.site < w.sub_hi;
}

Sequence apply_edit(const Sequence& x, const EditAction& a) {
    if (!is_structurally_valid(x, a)) {
        fail("invalid edit " + to_string(a) + " for sequence of length " +
             std::to_string(x.length()));
    }
    std::string s = x.str();
    switch (a.kind) {
        case EditKind::Sub:
            s[a.site] = to_char(a.token);
            break;
        case EditKind::Ins:
            s.insert(s.begin() + static_cast<std::ptrdiff_t>(a.site), to_char(a.token));
            break;
        case EditKind::Del:
            s.erase(s.begin() + static_cast<std::ptrdiff_t>(a.site));
            break;
    }
    return Sequence(std::move(s));
}

std::size_t anchor_site(const EditAction& a, const Sequence& child) {
    if (child.empty()) fail("anchor_site: empty child sequence");
    switch (a.kind) {
        case EditKind::Sub:
        case EditKind::Ins:
            return a.site;
        case EditKind::Del:
            return std::min(a.site, child.length() - 1);
    }
    fail("invalid edit kind value");
}

}  // namespace lpdp
