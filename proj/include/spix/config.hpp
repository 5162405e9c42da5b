#ifndef SPIX_CONFIG_HPP
#define SPIX_CONFIG_HPP

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "spix/error.hpp"
#include "spix/labels.hpp"
#include "spix/slic.hpp"

namespace spix {

/// key=value settings mirroring the tunable parameters of every module.
/// Unknown keys are rejected so typos never pass silently.
class Config {
 public:
  static const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d = {
        {"slic.step_size", "16"},
        {"slic.compactness", "10"},
        {"slic.iterations", "5"},
        {"slic.alpha", "1,1,1"},
        {"slic.beta", ""},           // one weight per extra channel; empty = all 1
        {"slic.min_component_frac", "0.25"},
        {"slic.perturb_seeds", "false"},
        {"scattering.J", "2"},
        {"scattering.L", "8"},
        {"scattering.mask", ""},     // comma list of 0/1 per map; empty = all maps
        {"scattering.channels", "L"},
        {"net.kind", "classification"},
        {"net.depth", "3"},
        {"net.Q", "7"},
        {"train.lr", "0.001"},
        {"train.batch", "64"},
        {"train.epochs", "10"},
        {"train.seed", "1"},
        {"labels.method", "slic_replication"},
        {"labels.X", "1"},
        {"labels.warmup_iterations", "2"},
        {"labels.mine_corrected_only", "false"},
        {"trainpix.batch", "4096"},
        {"eval.tol", "2"},
    };
    return d;
  }

  void set(const std::string& key, const std::string& value) {
    require(defaults().count(key) > 0, errc::bad_config, "unknown config key '" + key + "'");
    values_[key] = value;
  }

  void set_line(const std::string& line) {
    const auto eq = line.find('=');
    require(eq != std::string::npos, errc::bad_config, "expected key=value, got '" + line + "'");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), errc::io_error, "cannot open config file " + path);
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      set_line(line);
    }
  }

  std::string get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    const auto dit = defaults().find(key);
    require(dit != defaults().end(), errc::bad_config, "unknown config key '" + key + "'");
    return dit->second;
  }

  int get_int(const std::string& key) const {
    return parse<int>(key, "an integer");
  }

  std::uint64_t get_u64(const std::string& key) const {
    return parse<std::uint64_t>(key, "an unsigned integer");
  }

  double get_double(const std::string& key) const {
    return parse<double>(key, "a number");
  }

  bool get_bool(const std::string& key) const {
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    fail(errc::bad_config, key + " must be a boolean, got '" + v + "'");
  }

  std::vector<double> get_double_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        fail(errc::bad_config, key + " has a non-numeric entry '" + item + "'");
      }
    }
    return out;
  }

  /// Every known key with its effective value, for run logging.
  std::map<std::string, std::string> resolved() const {
    auto all = defaults();
    for (const auto& [k, v] : values_) all[k] = v;
    return all;
  }

 private:
  template <class T>
  T parse(const std::string& key, const char* what) const {
    std::istringstream ss(get(key));
    T v{};
    ss >> v;
    if (ss.fail() || !ss.eof()) fail(errc::bad_config, key + " must be " + what);
    return v;
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

/// SlicParams for an image with `extra_channels` feature channels beyond Lab.
inline SlicParams slic_params_from(const Config& cfg, int extra_channels = 0) {
  SlicParams p;
  p.step_size = cfg.get_int("slic.step_size");
  p.compactness = cfg.get_double("slic.compactness");
  p.iterations = cfg.get_int("slic.iterations");
  const auto alpha = cfg.get_double_list("slic.alpha");
  require(alpha.size() == 3, errc::bad_config, "slic.alpha needs exactly 3 weights");
  std::copy(alpha.begin(), alpha.end(), p.alpha.begin());
  p.beta = cfg.get_double_list("slic.beta");
  if (p.beta.empty()) p.beta.assign(extra_channels, 1.0);
  require(static_cast<int>(p.beta.size()) == extra_channels, errc::bad_config,
          "slic.beta must list one weight per extra channel");
  p.min_component_frac = cfg.get_double("slic.min_component_frac");
  p.perturb_seeds = cfg.get_bool("slic.perturb_seeds");
  return p;
}

inline LabelMethod label_method_from(const std::string& name) {
  if (name == "slic_replication") return LabelMethod::slic_replication;
  if (name == "gt_corrected") return LabelMethod::gt_corrected;
  if (name == "weakly_supervised") return LabelMethod::weakly_supervised;
  fail(errc::bad_config, "unknown label method '" + name + "'");
}

/// Mask over M scattering maps: empty selects all, otherwise a 0/1 list.
inline std::vector<bool> scattering_mask_from(const Config& cfg, int map_count) {
  const auto list = cfg.get_double_list("scattering.mask");
  if (list.empty()) return std::vector<bool>(map_count, true);
  require(static_cast<int>(list.size()) == map_count, errc::bad_config,
          "scattering.mask must list one flag per map");
  std::vector<bool> mask(map_count);
  for (std::size_t i = 0; i < list.size(); ++i) mask[i] = list[i] != 0.0;
  return mask;
}

}  // namespace spix

#endif  // SPIX_CONFIG_HPP
