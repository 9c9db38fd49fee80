#include "qoi/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "qoi/error.hpp"
#include "qoi/text.hpp"

namespace qoi {

using nlohmann::json;

const char* to_string(FamilyCategory category) {
    switch (category) {
        case FamilyCategory::ddos: return "ddos";
        case FamilyCategory::trojan: return "trojan";
        case FamilyCategory::targeted: return "targeted";
        case FamilyCategory::other: return "other";
    }
    return "other";
}

FamilyCategory family_category_from(std::string_view name) {
    if (name == "ddos") return FamilyCategory::ddos;
    if (name == "trojan") return FamilyCategory::trojan;
    if (name == "targeted") return FamilyCategory::targeted;
    if (name == "other") return FamilyCategory::other;
    raise(ErrorCode::config_error, "unknown family category: " + std::string(name));
}

const char* to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::altruist: return "altruist";
        case ProfileKind::volume_spammer: return "volume_spammer";
        case ProfileKind::silent: return "silent";
        case ProfileKind::copycat: return "copycat";
        case ProfileKind::mislabeler: return "mislabeler";
        case ProfileKind::mixed: return "mixed";
    }
    return "altruist";
}

ProfileKind profile_kind_from(std::string_view name) {
    if (name == "altruist") return ProfileKind::altruist;
    if (name == "volume_spammer") return ProfileKind::volume_spammer;
    if (name == "silent") return ProfileKind::silent;
    if (name == "copycat") return ProfileKind::copycat;
    if (name == "mislabeler") return ProfileKind::mislabeler;
    if (name == "mixed") return ProfileKind::mixed;
    raise(ErrorCode::config_error, "unknown profile kind: " + std::string(name));
}

StringTemplates StringTemplates::defaults_for(const std::string& label) {
    // The complete variant must avoid every utility keyword so it lands in the
    // "complete" class; generic/incomplete deliberately hit the rule table.
    StringTemplates t;
    t.complete = "win32." + label + ".a";
    t.generic = "trojan.win32.gen";
    t.incomplete = "unclassified.malware";
    return t;
}

void WorldSpec::validate() const {
    if (dimension == 0) raise(ErrorCode::config_error, "world: dimension must be >= 1");
    if (families.empty()) raise(ErrorCode::config_error, "world: no families");
    std::set<std::string> seen;
    for (const auto& family : families) {
        if (family.label.empty()) raise(ErrorCode::config_error, "world: empty family label");
        if (!seen.insert(fold_case(family.label)).second)
            raise(ErrorCode::config_error, "world: duplicate family label '" + family.label + "'");
    }
    double total = 0.0;
    for (std::size_t cat = 0; cat < kCategoryCount; ++cat) {
        double share = mix[cat];
        if (!std::isfinite(share) || share < 0.0)
            raise(ErrorCode::config_error, "world: mix shares must be finite and >= 0");
        total += share;
        if (share > 0.0) {
            bool populated = std::any_of(families.begin(), families.end(), [&](const FamilySpec& f) {
                return f.category == static_cast<FamilyCategory>(cat);
            });
            if (!populated)
                raise(ErrorCode::config_error,
                      std::string("world: mix gives weight to category '") +
                          to_string(static_cast<FamilyCategory>(cat)) + "' with no families");
        }
    }
    if (std::abs(total - 1.0) > 1e-9)
        raise(ErrorCode::config_error, "world: mix shares must sum to 1, got " + format_double(total));
    if (centroids.empty()) {
        if (families.size() > dimension)
            raise(ErrorCode::config_error,
                  "world: default axis-aligned centroids need dimension >= family count");
        if (!std::isfinite(separation) || separation <= 0.0)
            raise(ErrorCode::config_error, "world: separation must be finite and > 0");
    } else {
        if (centroids.size() != families.size())
            raise(ErrorCode::config_error, "world: centroid count must match family count");
        for (const auto& c : centroids) {
            if (c.size() != dimension)
                raise(ErrorCode::config_error, "world: centroid length must equal dimension");
        }
    }
    if (!covariance.empty()) {
        if (covariance.size() != dimension)
            raise(ErrorCode::config_error, "world: covariance must be dimension x dimension");
        for (const auto& row : covariance) {
            if (row.size() != dimension)
                raise(ErrorCode::config_error, "world: covariance must be dimension x dimension");
        }
    }
}

LabelSet WorldSpec::label_set() const {
    std::vector<std::string> labels;
    labels.reserve(families.size());
    for (const auto& family : families) labels.push_back(family.label);
    return LabelSet(std::move(labels));
}

std::vector<double> WorldSpec::centroid(std::size_t class_index) const {
    if (class_index >= families.size())
        raise(ErrorCode::usage_error, "world: class index out of range");
    if (!centroids.empty()) return centroids[class_index];
    std::vector<double> mu(dimension, 0.0);
    mu[class_index] = separation;
    return mu;
}

void ContributorProfile::validate() const {
    if (id.empty()) raise(ErrorCode::config_error, "contributor: empty id");
    if (!std::isfinite(label_accuracy) || label_accuracy < 0.0 || label_accuracy > 1.0)
        raise(ErrorCode::config_error, "contributor '" + id + "': label_accuracy must lie in [0, 1]");
    const double parts[] = {strings.complete, strings.generic, strings.incomplete};
    double total = 0.0;
    for (double p : parts) {
        if (!std::isfinite(p) || p < 0.0)
            raise(ErrorCode::config_error,
                  "contributor '" + id + "': string mix entries must be finite and >= 0");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        raise(ErrorCode::config_error, "contributor '" + id + "': string mix must sum to 1");
    if (mix) {
        double mix_total = 0.0;
        for (double share : *mix) {
            if (!std::isfinite(share) || share < 0.0)
                raise(ErrorCode::config_error,
                      "contributor '" + id + "': mix shares must be finite and >= 0");
            mix_total += share;
        }
        if (std::abs(mix_total - 1.0) > 1e-9)
            raise(ErrorCode::config_error, "contributor '" + id + "': mix shares must sum to 1");
    }
    if (!copy_source.empty() && kind != ProfileKind::copycat)
        raise(ErrorCode::config_error,
              "contributor '" + id + "': copy_source is only valid for copycats");
}

ContributorProfile ContributorProfile::preset(ProfileKind kind, std::string id) {
    ContributorProfile p;
    p.id = std::move(id);
    p.kind = kind;
    switch (kind) {
        case ProfileKind::altruist:
            p.samples = 40;
            p.label_accuracy = 0.98;
            p.strings = {1.0, 0.0, 0.0};
            p.mix = CategoryMix{0.2, 0.3, 0.5, 0.0};  // leans targeted/trojan
            break;
        case ProfileKind::volume_spammer:
            p.samples = 500;
            p.label_accuracy = 0.15;
            p.strings = {0.0, 0.5, 0.5};
            p.mix = CategoryMix{0.9, 0.05, 0.05, 0.0};
            break;
        case ProfileKind::silent:
            p.samples = 3;
            p.label_accuracy = 1.0;
            p.strings = {1.0, 0.0, 0.0};
            break;
        case ProfileKind::copycat:
            p.samples = 60;
            p.label_accuracy = 1.0;  // unused: samples are copied verbatim
            p.strings = {1.0, 0.0, 0.0};
            break;
        case ProfileKind::mislabeler:
            p.samples = 60;
            p.label_accuracy = 0.0;  // labels are cyclically shifted, never kept
            p.strings = {1.0, 0.0, 0.0};
            break;
        case ProfileKind::mixed:
            p.samples = 80;
            p.label_accuracy = 0.7;
            p.strings = {0.4, 0.4, 0.2};
            break;
    }
    return p;
}

void Scenario::validate() const {
    world.validate();
    if (reference_per_class < 2)
        raise(ErrorCode::config_error, "scenario: reference_per_class must be >= 2");
    if (contributors.empty()) raise(ErrorCode::config_error, "scenario: no contributors");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < contributors.size(); ++i) {
        const ContributorProfile& profile = contributors[i];
        profile.validate();
        if (!ids.insert(profile.id).second)
            raise(ErrorCode::config_error, "scenario: duplicate contributor id '" + profile.id + "'");
        if (profile.kind == ProfileKind::copycat) {
            if (i == 0)
                raise(ErrorCode::config_error,
                      "scenario: copycat '" + profile.id + "' has no earlier contributor to copy");
            if (!profile.copy_source.empty()) {
                bool found = false;
                for (std::size_t j = 0; j < i; ++j)
                    found = found || contributors[j].id == profile.copy_source;
                if (!found)
                    raise(ErrorCode::config_error, "scenario: copycat '" + profile.id +
                                                       "' copy_source '" + profile.copy_source +
                                                       "' must appear earlier in the list");
            }
        }
    }
}

WorldSpec default_world() {
    WorldSpec world;
    world.dimension = 11;
    world.separation = 8.0;
    const std::pair<const char*, FamilyCategory> families[] = {
        {"avzhan", FamilyCategory::ddos},     {"darkness", FamilyCategory::ddos},
        {"ddoser", FamilyCategory::ddos},     {"jkddos", FamilyCategory::ddos},
        {"n0ise", FamilyCategory::ddos},      {"zeus", FamilyCategory::trojan},
        {"shadyrat", FamilyCategory::targeted}, {"dnscalc", FamilyCategory::targeted},
        {"lurid", FamilyCategory::targeted},  {"getkys", FamilyCategory::targeted},
        {"zeroaccess", FamilyCategory::other},
    };
    for (const auto& [label, category] : families) {
        FamilySpec family;
        family.label = label;
        family.category = category;
        family.strings = StringTemplates::defaults_for(family.label);
        world.families.push_back(std::move(family));
    }
    return world;
}

Scenario default_scenario() {
    Scenario scenario;
    scenario.world = default_world();
    scenario.reference_per_class = 60;
    scenario.contributors = {
        ContributorProfile::preset(ProfileKind::altruist, "altruist-01"),
        ContributorProfile::preset(ProfileKind::volume_spammer, "spammer-01"),
        ContributorProfile::preset(ProfileKind::mislabeler, "mislabeler-01"),
        ContributorProfile::preset(ProfileKind::silent, "silent-01"),
        ContributorProfile::preset(ProfileKind::mixed, "mixed-01"),
        ContributorProfile::preset(ProfileKind::mixed, "mixed-02"),
        ContributorProfile::preset(ProfileKind::mixed, "mixed-03"),
        ContributorProfile::preset(ProfileKind::copycat, "copycat-01"),
    };
    // The copycat shadows a mid-quality contributor; copying the altruist
    // would only make the inversion easier to show.
    scenario.contributors.back().copy_source = "mixed-01";
    return scenario;
}

RelevanceWeights derive_relevance_weights(const WorldSpec& spec) {
    RelevanceWeights weights;
    for (const auto& family : spec.families) {
        double w = 0.0;
        switch (family.category) {
            case FamilyCategory::targeted: w = 5.0; break;
            case FamilyCategory::trojan: w = 3.0; break;
            case FamilyCategory::ddos: w = 1.0; break;
            case FamilyCategory::other: w = 0.0; break;
        }
        weights.weights[fold_case(family.label)] = w;
    }
    return weights;
}

namespace {

// Materialized sampling state: centroid rows and the covariance Cholesky
// factor (identity when the spec leaves the covariance implicit).
struct WorldSampler {
    Eigen::MatrixXd centroids;
    Eigen::MatrixXd chol;
    bool identity_cov = true;

    explicit WorldSampler(const WorldSpec& spec) {
        const auto lambda = static_cast<Eigen::Index>(spec.families.size());
        const auto d = static_cast<Eigen::Index>(spec.dimension);
        centroids.resize(lambda, d);
        for (Eigen::Index i = 0; i < lambda; ++i) {
            std::vector<double> mu = spec.centroid(static_cast<std::size_t>(i));
            for (Eigen::Index j = 0; j < d; ++j) centroids(i, j) = mu[static_cast<std::size_t>(j)];
        }
        if (!spec.covariance.empty()) {
            Eigen::MatrixXd sigma(d, d);
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j)
                    sigma(i, j) = spec.covariance[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            Eigen::LLT<Eigen::MatrixXd> llt(sigma);
            if (llt.info() != Eigen::Success)
                raise(ErrorCode::config_error, "world: covariance is not positive-definite");
            chol = llt.matrixL();
            identity_cov = false;
        }
    }

    std::vector<double> draw(std::size_t class_index, Rng& rng) const {
        const auto d = centroids.cols();
        Eigen::VectorXd z(d);
        for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.next_normal();
        Eigen::VectorXd x = centroids.row(static_cast<Eigen::Index>(class_index)).transpose();
        x += identity_cov ? z : Eigen::VectorXd(chol * z);
        return {x.data(), x.data() + x.size()};
    }
};

std::size_t draw_category(const CategoryMix& mix, Rng& rng) {
    double u = rng.next_uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t cat = 0; cat < kCategoryCount; ++cat) {
        if (mix[cat] <= 0.0) continue;
        last_positive = cat;
        cumulative += mix[cat];
        if (u < cumulative) return cat;
    }
    return last_positive;  // guards the u ~ 1 rounding edge
}

std::vector<std::vector<std::size_t>> families_by_category(const WorldSpec& spec) {
    std::vector<std::vector<std::size_t>> table(kCategoryCount);
    for (std::size_t i = 0; i < spec.families.size(); ++i)
        table[static_cast<std::size_t>(spec.families[i].category)].push_back(i);
    return table;
}

std::size_t draw_class(const WorldSpec& spec, const CategoryMix& mix,
                       const std::vector<std::vector<std::size_t>>& table, Rng& rng) {
    const auto& members = table[draw_category(mix, rng)];
    return members[rng.next_index(members.size())];
}

const std::string& template_for(const StringTemplates& strings, double u, const StringMix& mix) {
    if (u < mix.complete) return strings.complete;
    if (u < mix.complete + mix.generic) return strings.generic;
    return strings.incomplete;
}

}  // namespace

ReferenceDataset gen_reference(const WorldSpec& spec, std::size_t per_class, std::uint64_t seed) {
    spec.validate();
    if (per_class < 2)
        raise(ErrorCode::config_error, "gen_reference: per_class must be >= 2");
    WorldSampler sampler(spec);
    Rng rng(seed);
    std::vector<LabeledSample> samples;
    samples.reserve(spec.families.size() * per_class);
    for (std::size_t cls = 0; cls < spec.families.size(); ++cls) {
        const FamilySpec& family = spec.families[cls];
        for (std::size_t i = 0; i < per_class; ++i) {
            samples.push_back(make_sample(sampler.draw(cls, rng), family.label,
                                          family.strings.complete,
                                          "ref-" + family.label + "-" + std::to_string(i)));
        }
    }
    return build_reference(samples);
}

std::vector<std::size_t> gen_class_mix(const WorldSpec& spec, std::size_t total,
                                       std::uint64_t seed) {
    spec.validate();
    auto table = families_by_category(spec);
    Rng rng(seed);
    std::vector<std::size_t> counts(spec.families.size(), 0);
    for (std::size_t i = 0; i < total; ++i) ++counts[draw_class(spec, spec.mix, table, rng)];
    return counts;
}

IndicatorBatch gen_contributor(const ContributorProfile& profile, const WorldSpec& spec,
                               std::span<const IndicatorBatch> prior_batches,
                               std::uint64_t seed) {
    profile.validate();
    spec.validate();
    IndicatorBatch batch;
    batch.contributor_id = profile.id;

    if (profile.kind == ProfileKind::copycat) {
        if (prior_batches.empty())
            raise(ErrorCode::config_error,
                  "copycat '" + profile.id + "' needs at least one prior batch");
        const IndicatorBatch* source = &prior_batches.front();
        if (!profile.copy_source.empty()) {
            source = nullptr;
            for (const auto& prior : prior_batches) {
                if (prior.contributor_id == profile.copy_source) source = &prior;
            }
            if (source == nullptr)
                raise(ErrorCode::config_error, "copycat '" + profile.id + "': copy_source '" +
                                                   profile.copy_source + "' not found");
        }
        // Verbatim resubmission of the source's first k samples: same
        // features (hence same keys), same labels, same strings.
        std::size_t count = profile.samples == 0
                                ? source->samples.size()
                                : std::min(profile.samples, source->samples.size());
        batch.samples.assign(source->samples.begin(),
                             source->samples.begin() + static_cast<std::ptrdiff_t>(count));
        return batch;
    }

    WorldSampler sampler(spec);
    auto table = families_by_category(spec);
    const CategoryMix& mix = profile.mix ? *profile.mix : spec.mix;
    const std::size_t lambda = spec.families.size();
    Rng rng(seed);
    batch.samples.reserve(profile.samples);
    for (std::size_t i = 0; i < profile.samples; ++i) {
        std::size_t cls = draw_class(spec, mix, table, rng);
        std::vector<double> features = sampler.draw(cls, rng);

        std::size_t declared = cls;
        if (profile.kind == ProfileKind::mislabeler) {
            // Correct features under a fixed label permutation (cyclic shift,
            // fixed-point-free for two or more classes).
            declared = (cls + 1) % lambda;
        } else if (rng.next_uniform() >= profile.label_accuracy) {
            if (lambda > 1) {
                std::size_t offset = 1 + rng.next_index(lambda - 1);
                declared = (cls + offset) % lambda;
            }
        }

        const FamilySpec& declared_family = spec.families[declared];
        const std::string& label_string =
            template_for(declared_family.strings, rng.next_uniform(), profile.strings);
        batch.samples.push_back(make_sample(std::move(features), declared_family.label,
                                            label_string,
                                            profile.id + "-" + std::to_string(i)));
    }
    return batch;
}

Community gen_community(const Scenario& scenario, std::uint64_t master_seed) {
    scenario.validate();
    Community community;
    community.reference = gen_reference(scenario.world, scenario.reference_per_class,
                                        derive_seed(master_seed, "reference"));
    community.batches.reserve(scenario.contributors.size());
    for (const auto& profile : scenario.contributors) {
        community.batches.push_back(gen_contributor(profile, scenario.world, community.batches,
                                                    derive_seed(master_seed,
                                                                "contributor/" + profile.id)));
    }
    return community;
}

namespace {

json dump_mix(const CategoryMix& mix) {
    json j;
    for (std::size_t cat = 0; cat < kCategoryCount; ++cat)
        j[to_string(static_cast<FamilyCategory>(cat))] = mix[cat];
    return j;
}

CategoryMix parse_mix(const json& j, const std::string& context) {
    if (!j.is_object()) raise(ErrorCode::config_error, context + ": mix must be an object");
    CategoryMix mix = {0.0, 0.0, 0.0, 0.0};
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number())
            raise(ErrorCode::config_error, context + ": mix." + key + " must be a number");
        mix[static_cast<std::size_t>(family_category_from(key))] = value.get<double>();
    }
    return mix;
}

std::vector<std::vector<double>> parse_matrix(const json& j, const std::string& context) {
    if (!j.is_array()) raise(ErrorCode::config_error, context + " must be an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : j) {
        if (!row.is_array()) raise(ErrorCode::config_error, context + " rows must be arrays");
        std::vector<double> values;
        for (const auto& v : row) {
            if (!v.is_number()) raise(ErrorCode::config_error, context + " entries must be numbers");
            values.push_back(v.get<double>());
        }
        rows.push_back(std::move(values));
    }
    return rows;
}

}  // namespace

Scenario load_scenario(std::istream& in) {
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) raise(ErrorCode::parse_error, "scenario: invalid document");
    if (!j.is_object()) raise(ErrorCode::parse_error, "scenario: top level must be an object");

    Scenario scenario;
    if (!j.contains("world") || !j["world"].is_object())
        raise(ErrorCode::config_error, "scenario: missing 'world' object");
    const json& w = j["world"];
    scenario.world.families.clear();
    if (w.contains("dimension")) {
        if (!w["dimension"].is_number_unsigned())
            raise(ErrorCode::config_error, "world.dimension must be a non-negative integer");
        scenario.world.dimension = w["dimension"].get<std::size_t>();
    }
    if (w.contains("separation")) {
        if (!w["separation"].is_number())
            raise(ErrorCode::config_error, "world.separation must be a number");
        scenario.world.separation = w["separation"].get<double>();
    }
    if (w.contains("mix")) scenario.world.mix = parse_mix(w["mix"], "world");
    if (!w.contains("families") || !w["families"].is_array() || w["families"].empty())
        raise(ErrorCode::config_error, "world.families must be a non-empty array");
    for (const auto& f : w["families"]) {
        if (!f.is_object() || !f.contains("label") || !f["label"].is_string())
            raise(ErrorCode::config_error, "world.families entries need a string 'label'");
        FamilySpec family;
        family.label = f["label"].get<std::string>();
        if (!f.contains("category") || !f["category"].is_string())
            raise(ErrorCode::config_error,
                  "world.families['" + family.label + "'] needs a string 'category'");
        family.category = family_category_from(f["category"].get<std::string>());
        family.strings = StringTemplates::defaults_for(family.label);
        if (f.contains("strings")) {
            const json& s = f["strings"];
            if (!s.is_object())
                raise(ErrorCode::config_error,
                      "world.families['" + family.label + "'].strings must be an object");
            if (s.contains("complete")) family.strings.complete = s["complete"].get<std::string>();
            if (s.contains("generic")) family.strings.generic = s["generic"].get<std::string>();
            if (s.contains("incomplete"))
                family.strings.incomplete = s["incomplete"].get<std::string>();
        }
        scenario.world.families.push_back(std::move(family));
    }
    if (w.contains("centroids")) scenario.world.centroids = parse_matrix(w["centroids"], "world.centroids");
    if (w.contains("covariance"))
        scenario.world.covariance = parse_matrix(w["covariance"], "world.covariance");

    if (j.contains("reference_per_class")) {
        if (!j["reference_per_class"].is_number_unsigned())
            raise(ErrorCode::config_error, "scenario: reference_per_class must be a non-negative integer");
        scenario.reference_per_class = j["reference_per_class"].get<std::size_t>();
    }

    if (!j.contains("contributors") || !j["contributors"].is_array() || j["contributors"].empty())
        raise(ErrorCode::config_error, "scenario: contributors must be a non-empty array");
    for (const auto& c : j["contributors"]) {
        if (!c.is_object() || !c.contains("id") || !c["id"].is_string())
            raise(ErrorCode::config_error, "scenario: contributors entries need a string 'id'");
        std::string id = c["id"].get<std::string>();
        if (!c.contains("kind") || !c["kind"].is_string())
            raise(ErrorCode::config_error, "contributor '" + id + "': needs a string 'kind'");
        ContributorProfile profile =
            ContributorProfile::preset(profile_kind_from(c["kind"].get<std::string>()), id);
        if (c.contains("samples")) {
            if (!c["samples"].is_number_unsigned())
                raise(ErrorCode::config_error,
                      "contributor '" + id + "': samples must be a non-negative integer");
            profile.samples = c["samples"].get<std::size_t>();
        }
        if (c.contains("label_accuracy")) {
            if (!c["label_accuracy"].is_number())
                raise(ErrorCode::config_error,
                      "contributor '" + id + "': label_accuracy must be a number");
            profile.label_accuracy = c["label_accuracy"].get<double>();
        }
        if (c.contains("strings")) {
            const json& s = c["strings"];
            if (!s.is_object())
                raise(ErrorCode::config_error, "contributor '" + id + "': strings must be an object");
            StringMix strings{0.0, 0.0, 0.0};
            if (s.contains("complete")) strings.complete = s["complete"].get<double>();
            if (s.contains("generic")) strings.generic = s["generic"].get<double>();
            if (s.contains("incomplete")) strings.incomplete = s["incomplete"].get<double>();
            profile.strings = strings;
        }
        if (c.contains("mix")) profile.mix = parse_mix(c["mix"], "contributor '" + id + "'");
        if (c.contains("copy_source")) {
            if (!c["copy_source"].is_string())
                raise(ErrorCode::config_error,
                      "contributor '" + id + "': copy_source must be a string");
            profile.copy_source = c["copy_source"].get<std::string>();
        }
        scenario.contributors.push_back(std::move(profile));
    }
    scenario.validate();
    return scenario;
}

void save_scenario(std::ostream& out, const Scenario& scenario) {
    scenario.validate();
    json j;
    json& w = j["world"];
    w["dimension"] = scenario.world.dimension;
    w["separation"] = scenario.world.separation;
    w["mix"] = dump_mix(scenario.world.mix);
    w["families"] = json::array();
    for (const auto& family : scenario.world.families) {
        json f;
        f["label"] = family.label;
        f["category"] = to_string(family.category);
        f["strings"] = {{"complete", family.strings.complete},
                        {"generic", family.strings.generic},
                        {"incomplete", family.strings.incomplete}};
        w["families"].push_back(std::move(f));
    }
    if (!scenario.world.centroids.empty()) w["centroids"] = scenario.world.centroids;
    if (!scenario.world.covariance.empty()) w["covariance"] = scenario.world.covariance;
    j["reference_per_class"] = scenario.reference_per_class;
    j["contributors"] = json::array();
    for (const auto& profile : scenario.contributors) {
        json c;
        c["id"] = profile.id;
        c["kind"] = to_string(profile.kind);
        c["samples"] = profile.samples;
        c["label_accuracy"] = profile.label_accuracy;
        c["strings"] = {{"complete", profile.strings.complete},
                        {"generic", profile.strings.generic},
                        {"incomplete", profile.strings.incomplete}};
        if (profile.mix) c["mix"] = dump_mix(*profile.mix);
        if (!profile.copy_source.empty()) c["copy_source"] = profile.copy_source;
        j["contributors"].push_back(std::move(c));
    }
    out << j.dump(2) << '\n';
}

}  // namespace qoi
