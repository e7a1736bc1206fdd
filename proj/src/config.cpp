#include "fagan/train.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fagan {

void TrainConfig::validate() const {
    if (!(learning_rate > 0)) throw ConfigError("config: learning_rate must be > 0");
    if (iterations < 1) throw ConfigError("config: iterations must be >= 1");
    if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
    if (scale != 2 && scale != 4 && scale != 8) throw ConfigError("config: scale must be 2, 4 or 8");
    if (std::abs(alpha + beta - 1.0) > 1e-9) throw ConfigError("config: alpha + beta must equal 1");
    generator_config().validate();
}

GeneratorConfig TrainConfig::generator_config() const {
    GeneratorConfig g;
    g.width = generator_width;
    g.num_blocks = num_blocks;
    g.scale = scale;
    g.use_lffb = !disable_lffb;
    g.use_ca = !disable_ca;
    g.use_sa = !disable_sa;
    g.fusion.mode = fusion_mode;
    g.fusion.alpha = alpha;
    g.fusion.beta = beta;
    return g;
}

DiscriminatorConfig TrainConfig::discriminator_config() const {
    DiscriminatorConfig d;
    d.width = discriminator_width;
    d.sn_enabled = sn_enabled;
    d.sn_power_iterations = sn_power_iterations;
    return d;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: boolean expected for " + key + ", got '" + v + "'");
}

double parse_real(const std::string& v, const std::string& key) {
    std::size_t pos = 0;
    double d = 0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: number expected for " + key + ", got '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("config: trailing characters after number for " + key);
    return d;
}

std::size_t parse_uint(const std::string& v, const std::string& key) {
    const double d = parse_real(v, key);
    if (d < 0 || d != std::floor(d)) throw ConfigError("config: non-negative integer expected for " + key);
    return static_cast<std::size_t>(d);
}

}  // namespace

TrainConfig parse_config_text(const std::string& text, const std::string& origin) {
    TrainConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' at " + origin + ":" + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "learning_rate") cfg.learning_rate = parse_real(val, key);
        else if (key == "adam_beta1") cfg.adam_beta1 = parse_real(val, key);
        else if (key == "adam_beta2") cfg.adam_beta2 = parse_real(val, key);
        else if (key == "adam_eps") cfg.adam_eps = parse_real(val, key);
        else if (key == "scale") cfg.scale = parse_uint(val, key);
        else if (key == "iterations") cfg.iterations = parse_uint(val, key);
        else if (key == "batch_size") cfg.batch_size = parse_uint(val, key);
        else if (key == "seed") cfg.seed = static_cast<unsigned>(parse_uint(val, key));
        else if (key == "sn_enabled") cfg.sn_enabled = parse_bool(val, key);
        else if (key == "sn_power_iterations") cfg.sn_power_iterations = parse_uint(val, key);
        else if (key == "disable_sa") cfg.disable_sa = parse_bool(val, key);
        else if (key == "disable_ca") cfg.disable_ca = parse_bool(val, key);
        else if (key == "disable_lffb") cfg.disable_lffb = parse_bool(val, key);
        else if (key == "fusion_mode") {
            if (val == "direct") cfg.fusion_mode = FusionMode::Direct;
            else if (val == "weighted") cfg.fusion_mode = FusionMode::Weighted;
            else throw ConfigError("config: fusion_mode must be 'direct' or 'weighted'");
        } else if (key == "alpha") cfg.alpha = parse_real(val, key);
        else if (key == "beta") cfg.beta = parse_real(val, key);
        else if (key == "generator_width") cfg.generator_width = parse_uint(val, key);
        else if (key == "num_blocks") cfg.num_blocks = parse_uint(val, key);
        else if (key == "discriminator_width") cfg.discriminator_width = parse_uint(val, key);
        else if (key == "checkpoint_interval") cfg.checkpoint_interval = parse_uint(val, key);
        else if (key == "val_interval") cfg.val_interval = parse_uint(val, key);
        else if (key == "feature_mode") {
            if (val == "identity") cfg.feature_mode = FeatureMode::Identity;
            else if (val == "random_conv") cfg.feature_mode = FeatureMode::RandomConv;
            else throw ConfigError("config: feature_mode must be 'identity' or 'random_conv'");
        } else if (key == "feature_seed") cfg.feature_seed = static_cast<unsigned>(parse_uint(val, key));
        else throw ConfigError("config: unknown key '" + key + "' at " + origin + ":" + std::to_string(lineno));
    }
    cfg.validate();
    return cfg;
}

TrainConfig parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("parse_config: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::string serialize_config(const TrainConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "learning_rate = " << cfg.learning_rate << "\n";
    os << "adam_beta1 = " << cfg.adam_beta1 << "\n";
    os << "adam_beta2 = " << cfg.adam_beta2 << "\n";
    os << "adam_eps = " << cfg.adam_eps << "\n";
    os << "scale = " << cfg.scale << "\n";
    os << "iterations = " << cfg.iterations << "\n";
    os << "batch_size = " << cfg.batch_size << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "sn_enabled = " << (cfg.sn_enabled ? "true" : "false") << "\n";
    os << "sn_power_iterations = " << cfg.sn_power_iterations << "\n";
    os << "disable_sa = " << (cfg.disable_sa ? "true" : "false") << "\n";
    os << "disable_ca = " << (cfg.disable_ca ? "true" : "false") << "\n";
    os << "disable_lffb = " << (cfg.disable_lffb ? "true" : "false") << "\n";
    os << "fusion_mode = " << (cfg.fusion_mode == FusionMode::Direct ? "direct" : "weighted") << "\n";
    os << "alpha = " << cfg.alpha << "\n";
    os << "beta = " << cfg.beta << "\n";
    os << "generator_width = " << cfg.generator_width << "\n";
    os << "num_blocks = " << cfg.num_blocks << "\n";
    os << "discriminator_width = " << cfg.discriminator_width << "\n";
    os << "checkpoint_interval = " << cfg.checkpoint_interval << "\n";
    os << "val_interval = " << cfg.val_interval << "\n";
    os << "feature_mode = " << (cfg.feature_mode == FeatureMode::Identity ? "identity" : "random_conv")
       << "\n";
    os << "feature_seed = " << cfg.feature_seed << "\n";
    return os.str();
}

}  // namespace fagan
