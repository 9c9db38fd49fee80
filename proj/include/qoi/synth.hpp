#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qoi/indicator_model.hpp"
#include "qoi/metrics.hpp"
#include "qoi/rng.hpp"

namespace qoi {

// Relevance tiers. "other" covers families outside the three scored
// categories; it carries zero interest weight and zero mix share by default.
enum class FamilyCategory { ddos, trojan, targeted, other };
inline constexpr std::size_t kCategoryCount = 4;

const char* to_string(FamilyCategory category);
FamilyCategory family_category_from(std::string_view name);

// Vendor-style label-string variants per family, one per utility class.
struct StringTemplates {
    std::string complete;
    std::string generic;
    std::string incomplete;

    static StringTemplates defaults_for(const std::string& label);
};

struct FamilySpec {
    std::string label;
    FamilyCategory category = FamilyCategory::other;
    StringTemplates strings;
};

// Category shares in FamilyCategory order {ddos, trojan, targeted, other}.
using CategoryMix = std::array<double, kCategoryCount>;

struct WorldSpec {
    std::size_t dimension = 11;
    double separation = 8.0;  // centroid scale when centroids are not given
    std::vector<FamilySpec> families;
    CategoryMix mix = {0.54, 0.21, 0.25, 0.0};
    // Optional explicit geometry; when empty, centroid l = separation * e_l
    // and the covariance is the identity.
    std::vector<std::vector<double>> centroids;
    std::vector<std::vector<double>> covariance;

    void validate() const;
    LabelSet label_set() const;
    std::vector<double> centroid(std::size_t class_index) const;
};

enum class ProfileKind { altruist, volume_spammer, silent, copycat, mislabeler, mixed };

const char* to_string(ProfileKind kind);
ProfileKind profile_kind_from(std::string_view name);

// Probabilities of emitting each label-string class, summing to 1.
struct StringMix {
    double complete = 1.0;
    double generic = 0.0;
    double incomplete = 0.0;
};

struct ContributorProfile {
    std::string id;
    ProfileKind kind = ProfileKind::altruist;
    std::size_t samples = 40;
    double label_accuracy = 0.98;  // probability the declared label is the true one
    StringMix strings;
    std::optional<CategoryMix> mix;  // overrides the world mix when set
    std::string copy_source;         // copycat: id of an earlier contributor ("" = first)

    void validate() const;
    static ContributorProfile preset(ProfileKind kind, std::string id);
};

struct Scenario {
    WorldSpec world;
    std::size_t reference_per_class = 60;
    std::vector<ContributorProfile> contributors;

    void validate() const;
};

struct Community {
    ReferenceDataset reference;
    std::vector<IndicatorBatch> batches;
};

// Eleven stock malware families: five DDoS, one trojan, four targeted, one
// rootkit kept as unscored "other".
WorldSpec default_world();
Scenario default_scenario();

// Per-family interest weights from the category tiers: targeted 5, trojan 3,
// ddos 1, other 0.
RelevanceWeights derive_relevance_weights(const WorldSpec& spec);

ReferenceDataset gen_reference(const WorldSpec& spec, std::size_t per_class, std::uint64_t seed);

// Per-class sample counts for `total` draws from the category mix (families
// uniform within their category).
std::vector<std::size_t> gen_class_mix(const WorldSpec& spec, std::size_t total,
                                       std::uint64_t seed);

// Copycats re-submit samples from prior_batches, so they must be generated
// after their source.
IndicatorBatch gen_contributor(const ContributorProfile& profile, const WorldSpec& spec,
                               std::span<const IndicatorBatch> prior_batches,
                               std::uint64_t seed);

// Full scenario run: reference plus one batch per contributor, each from an
// independent seed stream derived from the master seed.
Community gen_community(const Scenario& scenario, std::uint64_t master_seed);

Scenario load_scenario(std::istream& in);
void save_scenario(std::ostream& out, const Scenario& scenario);

}  // namespace qoi
