#include "cogalign/scale.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "cogalign/errors.hpp"

namespace cogalign {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

}  // namespace

std::string_view to_string(Dimension d) {
    switch (d) {
        case Dimension::Calculation: return "Calculation";
        case Dimension::Belief: return "Belief";
        case Dimension::Information: return "Information";
        case Dimension::Social: return "Social";
        case Dimension::Memory: return "Memory";
    }
    return "?";
}

std::optional<Dimension> parse_dimension(std::string_view label) {
    for (Dimension d : kDimensions) {
        if (to_string(d) == label) return d;
    }
    return std::nullopt;
}

std::string_view to_string(SystemTag tag) { return tag == SystemTag::Hot ? "Hot" : "Cold"; }

std::optional<SystemTag> parse_system_tag(std::string_view label) {
    if (label == "Hot") return SystemTag::Hot;
    if (label == "Cold") return SystemTag::Cold;
    return std::nullopt;
}

Partition default_partition() {
    return {{Dimension::Calculation, SystemTag::Cold},
            {Dimension::Belief, SystemTag::Hot},
            {Dimension::Information, SystemTag::Cold},
            {Dimension::Social, SystemTag::Hot},
            {Dimension::Memory, SystemTag::Cold}};
}

std::optional<std::size_t> ScaleDefinition::index_of(std::string_view item_id) const {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].id == item_id) return i;
    }
    return std::nullopt;
}

const Item& ScaleDefinition::item(std::string_view item_id) const {
    const auto idx = index_of(item_id);
    if (!idx) throw Error(ErrorCode::UnknownItemColumn, "no item '" + std::string(item_id) + "' in scale " + name);
    return items[*idx];
}

std::vector<std::size_t> ScaleDefinition::items_in(Dimension d) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].dimension == d) out.push_back(i);
    }
    return out;
}

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::EmptyScale: return "EmptyScale";
        case ViolationKind::DuplicateId: return "DuplicateId";
        case ViolationKind::UnknownBias: return "UnknownBias";
        case ViolationKind::TooFewOptions: return "TooFewOptions";
        case ViolationKind::KeyNotInOptions: return "KeyNotInOptions";
        case ViolationKind::DuplicateOption: return "DuplicateOption";
        case ViolationKind::InvalidLikertRange: return "InvalidLikertRange";
        case ViolationKind::MissingPartition: return "MissingPartition";
        case ViolationKind::DimensionWithoutItems: return "DimensionWithoutItems";
    }
    return "?";
}

bool ValidationReport::valid() const {
    return std::none_of(violations.begin(), violations.end(), [](const Violation& v) { return !v.warning; });
}

std::size_t ValidationReport::count(ViolationKind kind) const {
    return static_cast<std::size_t>(std::count_if(
        violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; }));
}

ValidationReport validate_scale(const ScaleDefinition& def) {
    ValidationReport report;
    auto add = [&](ViolationKind kind, const std::string& item_id, std::string message, bool warning = false) {
        report.violations.push_back({kind, warning, item_id, std::move(message)});
    };

    if (def.items.empty()) add(ViolationKind::EmptyScale, "", "scale has no items");

    std::set<std::string> seen;
    for (const auto& item : def.items) {
        if (!seen.insert(item.id).second) add(ViolationKind::DuplicateId, item.id, "duplicate item id");
        if (!def.bias_catalog.contains(item.bias_name)) {
            add(ViolationKind::UnknownBias, item.id, "bias '" + item.bias_name + "' not in catalog");
        }
        if (const auto* mc = std::get_if<MultipleChoice>(&item.format)) {
            if (mc->options.size() < 2) add(ViolationKind::TooFewOptions, item.id, "needs at least 2 options");
            if (std::find(mc->options.begin(), mc->options.end(), mc->rational_key) == mc->options.end()) {
                add(ViolationKind::KeyNotInOptions, item.id, "rational_key '" + mc->rational_key + "' not an option");
            }
            std::set<std::string> opts(mc->options.begin(), mc->options.end());
            if (opts.size() != mc->options.size()) add(ViolationKind::DuplicateOption, item.id, "repeated option id");
        } else {
            const auto& lk = std::get<Likert>(item.format);
            if (lk.min >= lk.max) add(ViolationKind::InvalidLikertRange, item.id, "Likert min must be below max");
        }
    }

    for (Dimension d : kDimensions) {
        const bool used = std::any_of(def.items.begin(), def.items.end(),
                                      [&](const Item& it) { return it.dimension == d; });
        if (used && !def.hot_cold_partition.contains(d)) {
            add(ViolationKind::MissingPartition, "", "no hot/cold tag for " + std::string(to_string(d)));
        }
        if (!used) {
            add(ViolationKind::DimensionWithoutItems, "", std::string(to_string(d)) + " has no items", true);
        }
    }
    return report;
}

ScoredValue score_response(const Item& item, std::string_view raw) {
    const std::string value = trim(raw);
    if (const auto* mc = std::get_if<MultipleChoice>(&item.format)) {
        for (const auto& opt : mc->options) {
            if (iequals(opt, value)) {
                const bool correct = opt == mc->rational_key;
                return {correct ? 1.0 : 0.0, correct};
            }
        }
        throw Error(ErrorCode::UnparseableResponse, "'" + value + "' is not an option of item " + item.id);
    }
    int level = 0;
    const char* begin = value.data();
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, level);
    if (ec != std::errc{} || ptr != end || value.empty()) {
        throw Error(ErrorCode::UnparseableResponse, "'" + value + "' is not an integer level of item " + item.id);
    }
    return score_response(item, level);
}

ScoredValue score_response(const Item& item, int raw) {
    if (std::holds_alternative<MultipleChoice>(item.format)) {
        return score_response(item, std::to_string(raw));
    }
    const auto& lk = std::get<Likert>(item.format);
    if (raw < lk.min || raw > lk.max) {
        throw Error(ErrorCode::UnparseableResponse,
                    std::to_string(raw) + " outside " + std::to_string(lk.min) + ".." +
                        std::to_string(lk.max) + " for item " + item.id);
    }
    return {static_cast<double>(raw), std::nullopt};
}

double normalized_score(const Item& item, double value) {
    if (item.keyed()) return value;
    const auto& lk = std::get<Likert>(item.format);
    return (value - lk.min) / static_cast<double>(lk.max - lk.min);
}

std::string raw_for_score(const Item& item, double value) {
    if (const auto* mc = std::get_if<MultipleChoice>(&item.format)) {
        if (value != 0.0) return mc->rational_key;
        for (const auto& opt : mc->options) {
            if (opt != mc->rational_key) return opt;
        }
        return mc->rational_key;
    }
    return std::to_string(static_cast<int>(std::lround(value)));
}

ScaleDefinition demo_scale() {
    struct Seed {
        Dimension dim;
        const char* bias;
        const char* text;
    };
    // Four synthetic scenarios per dimension; the first two are keyed, the rest graded.
    const Seed seeds[] = {
        {Dimension::Calculation, "Anchoring",
         "[demo] A used bike is first listed at 900, then at 400. What is a fair price for a bike "
         "whose comparable models sell for 300?"},
        {Dimension::Calculation, "Base-rate neglect",
         "[demo] A test is 90% accurate for a condition affecting 1 in 1000 people. After a positive "
         "result, which probability range is most plausible?"},
        {Dimension::Calculation, "Sunk cost fallacy",
         "[demo] You paid for a non-refundable concert but feel unwell. How strongly would you still "
         "go because of the money spent?"},
        {Dimension::Calculation, "Gambler's fallacy",
         "[demo] A fair coin landed heads five times. How confident are you that tails is due next?"},
        {Dimension::Belief, "Confirmation bias",
         "[demo] To test the rule 'every card with a vowel has an even number on the back', which "
         "card should be turned over?"},
        {Dimension::Belief, "Belief perseverance",
         "[demo] A study you relied on is retracted. What should happen to the conclusion you drew "
         "from it?"},
        {Dimension::Belief, "Illusory correlation",
         "[demo] You recall two rainy days when your knee hurt. How much do you believe weather "
         "causes your knee pain?"},
        {Dimension::Belief, "Just-world hypothesis",
         "[demo] A stranger loses their savings in a fraud. How much do you feel they must have been "
         "careless?"},
        {Dimension::Information, "Availability heuristic",
         "[demo] After news of a plane crash, which travel mode is statistically safest for a 500 km "
         "trip?"},
        {Dimension::Information, "Framing effect",
         "[demo] Treatment X saves 200 of 600 patients; treatment Y lets 400 of 600 die. Which "
         "statement is accurate?"},
        {Dimension::Information, "Attentional bias",
         "[demo] A vivid headline dominates your news feed. How much does it shape your view of the "
         "overall topic?"},
        {Dimension::Information, "Information bias",
         "[demo] More data will not change your decision. How strongly would you still wait to "
         "collect it?"},
        {Dimension::Social, "Bandwagon effect",
         "[demo] Most colleagues back a plan you have evidence against. What is the best response?"},
        {Dimension::Social, "Authority bias",
         "[demo] A celebrated expert makes a claim outside their field. How should the claim be "
         "weighed?"},
        {Dimension::Social, "Halo effect",
         "[demo] A well-dressed candidate interviews confidently. How much does that raise your "
         "estimate of their technical skill?"},
        {Dimension::Social, "In-group bias",
         "[demo] Two equal proposals come from your team and another team. How much do you prefer "
         "your team's?"},
        {Dimension::Memory, "Hindsight bias",
         "[demo] After a market drop, a friend says it was obvious. What best describes how "
         "predictable it was beforehand?"},
        {Dimension::Memory, "Misinformation effect",
         "[demo] A witness hears a leading question about a broken window. How should their later "
         "report be treated?"},
        {Dimension::Memory, "Rosy retrospection",
         "[demo] Looking back on a stressful holiday, how pleasant do you now rate it?"},
        {Dimension::Memory, "Peak-end rule",
         "[demo] A long procedure ended gently. How much better do you rate it than a shorter, "
         "abrupt one?"},
    };

    ScaleDefinition scale;
    scale.name = "demo-bias-scale";
    scale.version = "1.0";
    scale.hot_cold_partition = default_partition();
    const char* prefix[] = {"CAL", "BEL", "INF", "SOC", "MEM"};
    std::array<int, 5> counters{};
    const char* keys[] = {"B", "C"};
    for (const auto& s : seeds) {
        const auto d = static_cast<std::size_t>(s.dim);
        const int k = ++counters[d];
        Item item;
        item.id = std::string(prefix[d]) + std::to_string(k);
        item.text = s.text;
        item.dimension = s.dim;
        item.bias_name = s.bias;
        if (k <= 2) {
            item.format = MultipleChoice{{"A", "B", "C", "D"}, keys[k - 1]};
        } else {
            item.format = Likert{1, 5};
        }
        scale.bias_catalog.insert(item.bias_name);
        scale.items.push_back(std::move(item));
    }
    return scale;
}

}  // namespace cogalign
