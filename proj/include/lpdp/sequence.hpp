#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lpdp {

// Four-letter DNA alphabet. The enum order A < C < G < T is the tie-breaking
// order used everywhere downstream.
enum class Nucleotide : std::uint8_t { A = 0, C = 1, G = 2, T = 3 };

char to_char(Nucleotide n);
Nucleotide nucleotide_from_char(char c);  // throws on anything but ACGT

enum class EditKind : std::uint8_t { Sub = 0, Ins = 1, Del = 2 };

std::string_view to_string(EditKind k);

// One edit action (site, kind, token). The token is meaningless for
// deletions and is normalized to A there so that comparisons stay canonical.
struct EditAction {
    std::size_t site = 0;
    EditKind kind = EditKind::Sub;
    Nucleotide token = Nucleotide::A;

    friend auto operator<=>(const EditAction&, const EditAction&) = default;
};

EditAction make_sub(std::size_t site, Nucleotide token);
EditAction make_ins(std::size_t site, Nucleotide token);
EditAction make_del(std::size_t site);

// Text form "kind@site" or "kind@site:token", e.g. "sub@3:T", "del@7".
std::string to_string(const EditAction& a);
EditAction parse_action(std::string_view text);

// Immutable variable-length DNA sequence.
class Sequence {
  public:
    Sequence() = default;
    explicit Sequence(std::string bases);  // validates alphabet

    std::size_t length() const { return bases_.size(); }
    bool empty() const { return bases_.empty(); }
    Nucleotide at(std::size_t i) const;
    const std::string& str() const { return bases_; }

    friend bool operator==(const Sequence&, const Sequence&) = default;
    friend auto operator<=>(const Sequence&, const Sequence&) = default;

  private:
    std::string bases_;
};

struct LengthBounds {
    std::size_t min_len = 1;
    std::size_t max_len = 512;
};

// Valid-action universe for a task: global length bounds plus an optional
// frozen prefix/suffix (inpainting). With frozen spans, only sites strictly
// inside the editable middle are allowed; insertions may also target the two
// boundary slots of the middle.
struct ActionSpace {
    LengthBounds bounds{};
    std::size_t frozen_prefix = 0;
    std::size_t frozen_suffix = 0;

    bool has_mask() const { return frozen_prefix > 0 || frozen_suffix > 0; }
};

void validate_bounds(const LengthBounds& b);
void validate_sequence(const Sequence& x, const ActionSpace& space);

// All valid actions at x, each exactly once, in canonical order
// (site asc, then sub < ins < del, then token A < C < G < T).
// Identity substitutions are excluded; deletions are dropped at min length
// and insertions at max length.
std::vector<EditAction> enumerate_actions(const Sequence& x, const ActionSpace& space);
std::vector<EditAction> enumerate_actions(const Sequence& x, const LengthBounds& bounds);

// True iff a is structurally valid at x (site ranges, non-identity sub).
// Does not consider length bounds or masks.
bool is_structurally_valid(const Sequence& x, const EditAction& a);

// True iff a would be produced by enumerate_actions(x, space).
bool is_valid_action(const Sequence& x, const EditAction& a, const ActionSpace& space);

// Applies a structurally valid edit; throws std::invalid_argument otherwise.
Sequence apply_edit(const Sequence& x, const EditAction& a);

// Anchor site of the edit that produced `child`: the substituted site for
// substitutions, the inserted token's position for insertions, and for
// deletions the deleted site clamped to the child's last index (so the
// anchor is always a valid index of the current sequence).
std::size_t anchor_site(const EditAction& a, const Sequence& child);

}  // namespace lpdp
