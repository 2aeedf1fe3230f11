#include "doctest.h"

#include <algorithm>
#include <set>

#include "lpdp/rng.hpp"
#include "lpdp/sequence.hpp"

using namespace lpdp;

namespace {

Sequence random_seq(Rng& rng, std::size_t len) {
    static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += kBases[rng.next() % 4];
    return Sequence(std::move(s));
}

std::size_t count_kind(const std::vector<EditAction>& v, EditKind k) {
    return static_cast<std::size_t>(
        std::count_if(v.begin(), v.end(), [&](const EditAction& a) { return a.kind == k; }));
}

}  // namespace

TEST_CASE("action counts on small sequences") {
    const LengthBounds wide{1, 10};

    auto acts = enumerate_actions(Sequence("AC"), wide);
    CHECK(acts.size() == 20);
    CHECK(count_kind(acts, EditKind::Sub) == 6);
    CHECK(count_kind(acts, EditKind::Ins) == 12);
    CHECK(count_kind(acts, EditKind::Del) == 2);

    acts = enumerate_actions(Sequence("A"), wide);
    CHECK(acts.size() == 11);
    CHECK(count_kind(acts, EditKind::Del) == 0);  // at min length

    acts = enumerate_actions(Sequence("ACGT"), LengthBounds{1, 4});
    CHECK(acts.size() == 16);
    CHECK(count_kind(acts, EditKind::Sub) == 12);
    CHECK(count_kind(acts, EditKind::Ins) == 0);  // at max length
    CHECK(count_kind(acts, EditKind::Del) == 4);
}

TEST_CASE("interior count formula 3L + 4(L+1) + L for L <= 12") {
    Rng rng(7);
    const LengthBounds bounds{1, 64};
    for (std::size_t len = 2; len <= 12; ++len) {
        const Sequence x = random_seq(rng, len);
        const auto acts = enumerate_actions(x, bounds);
        CHECK(acts.size() == 3 * len + 4 * (len + 1) + len);
    }
}

TEST_CASE("enumeration is canonical and duplicate-free") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Sequence x = random_seq(rng, 1 + rng.next() % 8);
        const auto acts = enumerate_actions(x, LengthBounds{1, 12});
        CHECK(std::is_sorted(acts.begin(), acts.end()));
        CHECK(std::adjacent_find(acts.begin(), acts.end()) == acts.end());
        for (const EditAction& a : acts) {
            if (a.kind == EditKind::Sub) CHECK(a.token != x.at(a.site));
        }
    }
}

TEST_CASE("apply_edit basic forms") {
    CHECK(apply_edit(Sequence("ACGT"), make_del(2)).str() == "ACT");
    CHECK(apply_edit(Sequence("ACGT"), make_ins(4, Nucleotide::A)).str() == "ACGTA");
    CHECK(apply_edit(Sequence("AC"), make_sub(0, Nucleotide::G)).str() == "GC");
}

TEST_CASE("apply_edit rejects invalid actions") {
    CHECK_THROWS_AS(apply_edit(Sequence("AC"), make_del(2)), std::invalid_argument);
    CHECK_THROWS_AS(apply_edit(Sequence("AC"), make_sub(0, Nucleotide::A)),
                    std::invalid_argument);  // identity substitution
    CHECK_THROWS_AS(apply_edit(Sequence("AC"), make_ins(3, Nucleotide::A)),
                    std::invalid_argument);
}

TEST_CASE("anchor sites") {
    // substitution anchors at the substituted site
    const Sequence x8("ACGTACGT");
    const EditAction sub3 = make_sub(3, Nucleotide::A);
    CHECK(anchor_site(sub3, apply_edit(x8, sub3)) == 3);

    // insertion anchors at the inserted token's position
    const EditAction ins0 = make_ins(0, Nucleotide::A);
    CHECK(anchor_site(ins0, Sequence("AGC")) == 0);

    // terminal deletion clamps to the child's last index
    const Sequence x5("ACGTA");
    const EditAction del4 = make_del(4);
    const Sequence child = apply_edit(x5, del4);
    CHECK(child.length() == 4);
    CHECK(anchor_site(del4, child) == 3);
}

TEST_CASE("substitution round trip and ins/del inverse") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const Sequence x = random_seq(rng, 2 + rng.next() % 6);
        const auto acts = enumerate_actions(x, LengthBounds{1, 16});
        const EditAction a = acts[rng.next() % acts.size()];
        const Sequence y = apply_edit(x, a);
        if (a.kind == EditKind::Sub) {
            const EditAction inverse = make_sub(a.site, x.at(a.site));
            CHECK(apply_edit(y, inverse) == x);
        }
        if (a.kind == EditKind::Ins) {
            CHECK(apply_edit(y, make_del(a.site)) == x);
        }
    }
}

TEST_CASE("enumerated edits always respect bounds") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const LengthBounds b{2, 6};
        const Sequence x = random_seq(rng, 2 + rng.next() % 5);
        for (const EditAction& a : enumerate_actions(x, b)) {
            const Sequence y = apply_edit(x, a);
            CHECK(y.length() >= b.min_len);
            CHECK(y.length() <= b.max_len);
        }
    }
}

TEST_CASE("action text round trip") {
    CHECK(to_string(make_sub(3, Nucleotide::T)) == "sub@3:T");
    CHECK(to_string(make_del(7)) == "del@7");
    CHECK(to_string(make_ins(0, Nucleotide::A)) == "ins@0:A");
    for (const char* text : {"sub@3:T", "del@7", "ins@0:A", "ins@12:G"}) {
        CHECK(to_string(parse_action(text)) == text);
    }
    CHECK_THROWS(parse_action("swap@1:A"));
    CHECK_THROWS(parse_action("sub@x:A"));
    CHECK_THROWS(parse_action("del@1:T"));
}

TEST_CASE("inpainting mask restricts edit sites") {
    // frozen "AC" prefix and "GT" suffix; middle is the two middle bases
    ActionSpace space{LengthBounds{2, 12}, 2, 2};
    const Sequence x("ACTAGT");
    const auto acts = enumerate_actions(x, space);
    REQUIRE(!acts.empty());
    for (const EditAction& a : acts) {
        if (a.kind == EditKind::Ins) {
            CHECK(a.site >= 2);
            CHECK(a.site <= 4);
        } else {
            CHECK(a.site >= 2);
            CHECK(a.site < 4);
        }
    }
    // the frozen flanks never change under any enumerated edit
    for (const EditAction& a : acts) {
        const Sequence y = apply_edit(x, a);
        CHECK(y.str().substr(0, 2) == "AC");
        CHECK(y.str().substr(y.length() - 2) == "GT");
    }
}

TEST_CASE("empty editable middle still offers insertions") {
    ActionSpace space{LengthBounds{2, 12}, 2, 2};
    const Sequence x("ACGT");  // middle empty
    const auto acts = enumerate_actions(x, space);
    CHECK(acts.size() == 4);
    for (const EditAction& a : acts) {
        CHECK(a.kind == EditKind::Ins);
        CHECK(a.site == 2);
    }
}
