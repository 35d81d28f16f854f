#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cogalign {

/// The five scale dimensions, in canonical order (used for tie-breaking).
enum class Dimension { Calculation, Belief, Information, Social, Memory };

inline constexpr std::array<Dimension, 5> kDimensions = {
    Dimension::Calculation, Dimension::Belief, Dimension::Information, Dimension::Social,
    Dimension::Memory};

std::string_view to_string(Dimension d);
std::optional<Dimension> parse_dimension(std::string_view label);

enum class SystemTag { Hot, Cold };

std::string_view to_string(SystemTag tag);
std::optional<SystemTag> parse_system_tag(std::string_view label);

using Partition = std::map<Dimension, SystemTag>;

/// Hot = {Social, Belief}; Cold = {Calculation, Information, Memory}.
Partition default_partition();

struct MultipleChoice {
    std::vector<std::string> options;
    std::string rational_key;
    bool operator==(const MultipleChoice&) const = default;
};

struct Likert {
    int min = 1;
    int max = 5;
    bool operator==(const Likert&) const = default;
};

using ItemFormat = std::variant<MultipleChoice, Likert>;

struct Item {
    std::string id;
    std::string text;
    Dimension dimension = Dimension::Calculation;
    std::string bias_name;
    ItemFormat format;

    [[nodiscard]] bool keyed() const { return std::holds_alternative<MultipleChoice>(format); }
    bool operator==(const Item&) const = default;
};

struct ScaleDefinition {
    std::string name;
    std::string version;
    std::vector<Item> items;
    std::set<std::string> bias_catalog;
    Partition hot_cold_partition;

    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view item_id) const;
    [[nodiscard]] const Item& item(std::string_view item_id) const;
    [[nodiscard]] std::vector<std::size_t> items_in(Dimension d) const;
    bool operator==(const ScaleDefinition&) const = default;
};

enum class ViolationKind {
    EmptyScale,
    DuplicateId,
    UnknownBias,
    TooFewOptions,
    KeyNotInOptions,
    DuplicateOption,
    InvalidLikertRange,
    MissingPartition,
    DimensionWithoutItems,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    /// Warnings do not make a scale invalid.
    bool warning = false;
    std::string item_id;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool valid() const;
    [[nodiscard]] std::size_t count(ViolationKind kind) const;
};

[[nodiscard]] ValidationReport validate_scale(const ScaleDefinition& def);

struct ScoredValue {
    double value = 0.0;
    /// Only set for keyed (multiple-choice) items.
    std::optional<bool> correct;
    bool operator==(const ScoredValue&) const = default;
};

/// Throws UnparseableResponse when raw is not a valid option or level.
[[nodiscard]] ScoredValue score_response(const Item& item, std::string_view raw);
[[nodiscard]] ScoredValue score_response(const Item& item, int raw);

/// Score mapped onto [0, 1]: keyed items are 0/1, Likert uses (v - min) / (max - min).
[[nodiscard]] double normalized_score(const Item& item, double value);

/// Raw response text that scores to `value` (inverse of score_response).
[[nodiscard]] std::string raw_for_score(const Item& item, double value);

/// 20-item demonstration scale with synthetic text. Not the real instrument.
[[nodiscard]] ScaleDefinition demo_scale();

}  // namespace cogalign
