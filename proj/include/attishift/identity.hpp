#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace attishift {

enum class IdentityGroup { neutral, bg, nbg };
enum class PronounRole { subject, object, possessive, reflexive };
enum class Agreement { singular, plural };

inline constexpr std::array<PronounRole, 4> kPronounRoles{
    PronounRole::subject, PronounRole::object, PronounRole::possessive, PronounRole::reflexive};

std::string_view to_string(IdentityGroup group);
std::string_view to_string(PronounRole role);
std::string_view to_string(Agreement agreement);
IdentityGroup parse_identity_group(std::string_view s);
PronounRole parse_pronoun_role(std::string_view s);  // throws InputError
Agreement parse_agreement(std::string_view s);

// Binary-gender keys are "man" and "woman", the neutral key is "person";
// every other key is non-binary.
IdentityGroup expected_group(std::string_view key);

/// One identity setting: per-language surface forms and pronouns.
///
/// Surfaces carry their article in lower case ("the trans man"); sentence-
/// initial capitalisation happens at realization time. `agreement` is the
/// verb agreement class of the subject pronoun (they -> plural).
struct IdentityProfile {
  std::string key;
  IdentityGroup group = IdentityGroup::nbg;
  std::map<std::string, std::string> surface;
  std::map<std::string, std::map<PronounRole, std::string>> pronouns;
  Agreement agreement = Agreement::singular;
  // Bare noun for the seed template ("man" in "He is a nice man."). Derived
  // from the English surface when empty.
  std::string seed_noun;

  void validate() const;
  const std::string& surface_for(std::string_view language) const;
  const std::string& pronoun(std::string_view language, PronounRole role) const;
  std::string noun_for_seed() const;
};

// The fourteen English/Chinese settings: person, woman, man and eleven
// non-binary identities, all with pronouns following the simplified
// identity-to-pronoun mapping (he/him, she/her or they/them).
std::vector<IdentityProfile> default_profiles();

nlohmann::json to_json(const IdentityProfile& profile);
IdentityProfile profile_from_json(const nlohmann::json& j);

// Reads `{"profiles": [...]}` or a bare array. Keys must be unique.
std::vector<IdentityProfile> load_profiles(const std::filesystem::path& path);

const IdentityProfile* find_profile(const std::vector<IdentityProfile>& profiles,
                                    std::string_view key);

}  // namespace attishift
