#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audioplace/angles.hpp"
#include "audioplace/errors.hpp"

namespace audioplace {

struct Element {
  std::string id;
  Azimuth visual_azimuth;
  double elevation_deg = 0.0;
  std::optional<std::string> label;
};

/// Virtual elements ordered by ascending visual azimuth from 0 deg.
///
/// Ids are unique and n >= 1. Elements sharing an azimuth are pushed apart by
/// kDuplicateOffsetDeg steps (in id order) so the order is strict.
class Layout {
 public:
  static constexpr double kDuplicateOffsetDeg = 0.001;

  explicit Layout(std::vector<Element> elements, const std::string& source = "layout");

  std::size_t size() const { return elements_.size(); }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& operator[](std::size_t i) const { return elements_[i]; }

  /// Ids whose azimuth was shifted to break a tie.
  const std::vector<std::string>& perturbed_ids() const { return perturbed_; }

 private:
  std::vector<Element> elements_;
  std::vector<std::string> perturbed_;
};

inline Layout::Layout(std::vector<Element> elements, const std::string& source)
    : elements_(std::move(elements)) {
  if (elements_.empty()) throw InputError(source, "layout has no elements");
  std::set<std::string> seen;
  for (const auto& e : elements_) {
    if (e.id.empty()) throw InputError(source, "element id must be non-empty");
    if (!seen.insert(e.id).second) throw InputError(source, "duplicate element id '" + e.id + "'");
  }
  const auto by_azimuth = [](const Element& a, const Element& b) {
    if (a.visual_azimuth != b.visual_azimuth) return a.visual_azimuth < b.visual_azimuth;
    return a.id < b.id;
  };
  std::sort(elements_.begin(), elements_.end(), by_azimuth);
  // A shift can land on another element's azimuth, so repeat until strict.
  for (std::size_t pass = 0; pass <= elements_.size(); ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < elements_.size();) {
      std::size_t j = i + 1;
      while (j < elements_.size() && elements_[j].visual_azimuth == elements_[i].visual_azimuth) {
        ++j;
      }
      for (std::size_t k = i + 1; k < j; ++k) {
        auto& e = elements_[k];
        e.visual_azimuth =
            Azimuth(e.visual_azimuth.degrees() + kDuplicateOffsetDeg * static_cast<double>(k - i));
        if (std::find(perturbed_.begin(), perturbed_.end(), e.id) == perturbed_.end()) {
          perturbed_.push_back(e.id);
        }
        changed = true;
      }
      i = j;
    }
    if (!changed) break;
    std::sort(elements_.begin(), elements_.end(), by_azimuth);
  }
}

inline Layout layout_from_json(const nlohmann::json& j, const std::string& source) {
  if (!j.is_object() || !j.contains("elements") || !j.at("elements").is_array()) {
    throw InputError(source, "expected {\"elements\": [...]}");
  }
  std::vector<Element> elements;
  const auto& arr = j.at("elements");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& e = arr.at(i);
    const std::string where = source + ":elements[" + std::to_string(i) + "]";
    if (!e.is_object()) throw InputError(where, "expected an object");
    if (!e.contains("id") || !e.at("id").is_string()) throw InputError(where + ".id", "missing string");
    if (!e.contains("azimuth_deg") || !e.at("azimuth_deg").is_number()) {
      throw InputError(where + ".azimuth_deg", "missing number");
    }
    Element el;
    el.id = e.at("id").get<std::string>();
    const double az = e.at("azimuth_deg").get<double>();
    if (!std::isfinite(az)) throw InputError(where + ".azimuth_deg", "must be finite");
    el.visual_azimuth = Azimuth(az);
    if (e.contains("elevation_deg")) {
      if (!e.at("elevation_deg").is_number()) throw InputError(where + ".elevation_deg", "not a number");
      el.elevation_deg = e.at("elevation_deg").get<double>();
    }
    if (e.contains("label") && !e.at("label").is_null()) {
      if (!e.at("label").is_string()) throw InputError(where + ".label", "not a string");
      el.label = e.at("label").get<std::string>();
    }
    elements.push_back(std::move(el));
  }
  return Layout(std::move(elements), source);
}

inline Layout load_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, "cannot open layout file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path, e.what());
  }
  return layout_from_json(j, path);
}

inline nlohmann::ordered_json to_json(const Layout& layout) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : layout.elements()) {
    nlohmann::ordered_json item{{"id", e.id},
                                {"azimuth_deg", e.visual_azimuth.degrees()},
                                {"elevation_deg", e.elevation_deg}};
    if (e.label) item["label"] = *e.label;
    arr.push_back(std::move(item));
  }
  return {{"elements", arr}};
}

}  // namespace audioplace
