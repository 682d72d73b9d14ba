#include "attishift/identity.hpp"

#include <fstream>
#include <set>

#include "attishift/error.hpp"

namespace attishift {

std::string_view to_string(IdentityGroup group) {
  switch (group) {
    case IdentityGroup::neutral: return "neutral";
    case IdentityGroup::bg: return "BG";
    case IdentityGroup::nbg: return "NBG";
  }
  return "unknown";
}

std::string_view to_string(PronounRole role) {
  switch (role) {
    case PronounRole::subject: return "subject";
    case PronounRole::object: return "object";
    case PronounRole::possessive: return "possessive";
    case PronounRole::reflexive: return "reflexive";
  }
  return "unknown";
}

std::string_view to_string(Agreement agreement) {
  return agreement == Agreement::singular ? "singular" : "plural";
}

IdentityGroup parse_identity_group(std::string_view s) {
  if (s == "neutral") return IdentityGroup::neutral;
  if (s == "BG" || s == "bg") return IdentityGroup::bg;
  if (s == "NBG" || s == "nbg") return IdentityGroup::nbg;
  throw InputError("unknown identity group '" + std::string(s) + "'");
}

PronounRole parse_pronoun_role(std::string_view s) {
  for (auto role : kPronounRoles)
    if (to_string(role) == s) return role;
  throw InputError("unknown pronoun role '" + std::string(s) + "'");
}

Agreement parse_agreement(std::string_view s) {
  if (s == "singular") return Agreement::singular;
  if (s == "plural") return Agreement::plural;
  throw InputError("unknown agreement class '" + std::string(s) + "'");
}

IdentityGroup expected_group(std::string_view key) {
  if (key == "man" || key == "woman") return IdentityGroup::bg;
  if (key == "person") return IdentityGroup::neutral;
  return IdentityGroup::nbg;
}

void IdentityProfile::validate() const {
  if (key.empty()) throw InputError("identity profile without a key");
  if (group != expected_group(key))
    throw InputError("identity '" + key + "' must be in group " +
                     std::string(to_string(expected_group(key))));
  if (surface.empty()) throw InputError("identity '" + key + "' has no surface forms");
  for (const auto& [lang, form] : surface) {
    if (form.empty()) throw InputError("identity '" + key + "' has an empty " + lang + " surface");
    auto it = pronouns.find(lang);
    if (it == pronouns.end())
      throw InputError("identity '" + key + "' has no " + lang + " pronouns");
    for (auto role : kPronounRoles) {
      auto r = it->second.find(role);
      if (r == it->second.end() || r->second.empty())
        throw InputError("identity '" + key + "' lacks the " + lang + " " +
                         std::string(to_string(role)) + " pronoun");
    }
  }
}

const std::string& IdentityProfile::surface_for(std::string_view language) const {
  auto it = surface.find(std::string(language));
  if (it == surface.end())
    throw RealizationError("identity '" + key + "' has no " + std::string(language) + " surface");
  return it->second;
}

const std::string& IdentityProfile::pronoun(std::string_view language, PronounRole role) const {
  auto it = pronouns.find(std::string(language));
  if (it == pronouns.end())
    throw RealizationError("identity '" + key + "' has no " + std::string(language) +
                           " pronouns");
  auto r = it->second.find(role);
  if (r == it->second.end() || r->second.empty())
    throw RealizationError("identity '" + key + "' lacks the " + std::string(language) + " " +
                           std::string(to_string(role)) + " pronoun");
  return r->second;
}

std::string IdentityProfile::noun_for_seed() const {
  if (!seed_noun.empty()) return seed_noun;
  std::string s = surface_for("en");
  for (std::string_view article : {"the ", "The ", "a ", "A ", "an ", "An "})
    if (s.starts_with(article)) return s.substr(article.size());
  return s;
}

namespace {

using RoleMap = std::map<PronounRole, std::string>;

RoleMap en_pronouns(std::string_view subject) {
  if (subject == "he")
    return {{PronounRole::subject, "he"}, {PronounRole::object, "him"},
            {PronounRole::possessive, "his"}, {PronounRole::reflexive, "himself"}};
  if (subject == "she")
    return {{PronounRole::subject, "she"}, {PronounRole::object, "her"},
            {PronounRole::possessive, "her"}, {PronounRole::reflexive, "herself"}};
  return {{PronounRole::subject, "they"}, {PronounRole::object, "them"},
          {PronounRole::possessive, "their"}, {PronounRole::reflexive, "themselves"}};
}

RoleMap zh_pronouns(std::string_view subject) {
  const std::string base = subject == "he" ? "他" : subject == "she" ? "她" : "TA";
  return {{PronounRole::subject, base}, {PronounRole::object, base},
          {PronounRole::possessive, base + "的"}, {PronounRole::reflexive, base + "自己"}};
}

IdentityProfile make(std::string key, std::string en, std::string zh, std::string_view subject) {
  IdentityProfile p;
  p.group = expected_group(key);
  p.key = std::move(key);
  p.surface = {{"en", std::move(en)}, {"zh", std::move(zh)}};
  p.pronouns = {{"en", en_pronouns(subject)}, {"zh", zh_pronouns(subject)}};
  p.agreement = subject == "they" ? Agreement::plural : Agreement::singular;
  return p;
}

}  // namespace

std::vector<IdentityProfile> default_profiles() {
  return {
      make("person", "the person", "这个人", "they"),
      make("woman", "the woman", "这个女人", "she"),
      make("man", "the man", "这个男人", "he"),
      make("androgynous", "the androgynous", "这个雌雄同体的人", "they"),
      make("cisgender", "the cisgender", "这个顺性别者", "they"),
      make("genderqueer", "the genderqueer", "这个性别酷儿", "they"),
      make("intersex", "the intersex", "这个双性人", "they"),
      make("transgender", "the transgender", "这个跨性别者", "they"),
      make("trans_woman", "the trans woman", "这个跨性别女性", "she"),
      make("trans_man", "the trans man", "这个跨性别男人", "he"),
      make("queer", "the queer", "这个酷儿", "they"),
      make("lesbian", "the lesbian", "这个女同性恋", "she"),
      make("gay", "the gay", "这个同性恋", "he"),
      make("bisexual", "the bisexual", "这个双性恋者", "they"),
  };
}

nlohmann::json to_json(const IdentityProfile& p) {
  nlohmann::json j;
  j["key"] = p.key;
  j["group"] = to_string(p.group);
  j["surface"] = p.surface;
  nlohmann::json pron = nlohmann::json::object();
  for (const auto& [lang, roles] : p.pronouns)
    for (const auto& [role, form] : roles) pron[lang][std::string(to_string(role))] = form;
  j["pronouns"] = pron;
  j["agreement"] = to_string(p.agreement);
  if (!p.seed_noun.empty()) j["seed_noun"] = p.seed_noun;
  return j;
}

IdentityProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("identity profile must be an object");
  IdentityProfile p;
  try {
    p.key = j.at("key").get<std::string>();
    p.group = j.contains("group") ? parse_identity_group(j["group"].get<std::string>())
                                  : expected_group(p.key);
    p.surface = j.at("surface").get<std::map<std::string, std::string>>();
    for (const auto& [lang, roles] : j.at("pronouns").items())
      for (const auto& [role, form] : roles.items())
        p.pronouns[lang][parse_pronoun_role(role)] = form.get<std::string>();
    p.agreement = parse_agreement(j.at("agreement").get<std::string>());
    if (j.contains("seed_noun")) p.seed_noun = j["seed_noun"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed identity profile: ") + e.what());
  }
  p.validate();
  return p;
}

std::vector<IdentityProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open identity profiles " + path.string());
  auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError(path.string() + " is not valid JSON");
  const auto& list = doc.is_object() && doc.contains("profiles") ? doc["profiles"] : doc;
  if (!list.is_array() || list.empty())
    throw ConfigError(path.string() + " must list at least one identity profile");
  std::vector<IdentityProfile> out;
  std::set<std::string> seen;
  for (const auto& item : list) {
    auto p = profile_from_json(item);
    if (!seen.insert(p.key).second) throw ConfigError("duplicate identity key '" + p.key + "'");
    out.push_back(std::move(p));
  }
  return out;
}

const IdentityProfile* find_profile(const std::vector<IdentityProfile>& profiles,
                                    std::string_view key) {
  for (const auto& p : profiles)
    if (p.key == key) return &p;
  return nullptr;
}

}  // namespace attishift
