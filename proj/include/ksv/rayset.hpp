#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ksv/errors.hpp"
#include "ksv/ray.hpp"

namespace ksv {

/// Labeled collection of rays sharing one dimension.  Labels are unique;
/// vertex order is the insertion order and fixes the canonical order used by
/// graphs, bitmask encodings and reports downstream.
class RaySet {
 public:
  RaySet(std::string name, int dim) : name_(std::move(name)), dim_(dim) {}

  void add(Ray r) {
    if (r.dim != dim_)
      throw DimensionMismatchError("ray '" + r.label + "' has dimension " +
                                   std::to_string(r.dim) + ", set expects " +
                                   std::to_string(dim_));
    if (index_.count(r.label))
      throw ParseError("duplicate ray label '" + r.label + "'");
    index_.emplace(r.label, rays_.size());
    rays_.push_back(std::move(r));
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(rays_.size()); }
  const Ray& ray(int i) const { return rays_[i]; }
  const std::vector<Ray>& rays() const { return rays_; }

  int index_of(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? -1 : static_cast<int>(it->second);
  }
  bool has(const std::string& label) const { return index_.count(label) != 0; }
  const Ray& ray(const std::string& label) const {
    int i = index_of(label);
    if (i < 0) throw ParseError("no ray labeled '" + label + "'");
    return rays_[i];
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(rays_.size());
    for (const auto& r : rays_) out.push_back(r.label);
    return out;
  }

 private:
  std::string name_;
  int dim_;
  std::vector<Ray> rays_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// The built-in 13-ray qutrit set, in the frozen canonical vertex order
/// (z1 z2 z3, y1- y2- y3-, y1+ y2+ y3+, h0 h1 h2 h3).
inline const RaySet& yu_oh_13() {
  static const RaySet set = [] {
    RaySet s("yu-oh-13", 3);
    const std::vector<std::pair<std::string, std::vector<std::int64_t>>> data = {
        {"z1", {1, 0, 0}},   {"z2", {0, 1, 0}},   {"z3", {0, 0, 1}},
        {"y1-", {0, 1, -1}}, {"y2-", {1, 0, -1}}, {"y3-", {1, -1, 0}},
        {"y1+", {0, 1, 1}},  {"y2+", {1, 0, 1}},  {"y3+", {1, 1, 0}},
        {"h0", {1, 1, 1}},   {"h1", {-1, 1, 1}},  {"h2", {1, -1, 1}},
        {"h3", {1, 1, -1}},
    };
    for (const auto& [label, comps] : data) s.add(canonicalize_ray(comps, 3, label));
    return s;
  }();
  return set;
}

}  // namespace ksv
