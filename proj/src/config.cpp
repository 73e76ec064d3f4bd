// SPDX-License-Identifier: Apache-2.0
#include "score/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "score/io.hpp"
#include "score/providers.hpp"

namespace score {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

KvConfig KvConfig::parse_file(const std::filesystem::path& path) {
    return parse_string(read_file(path), path.filename().string());
}

KvConfig KvConfig::parse_string(const std::string& text, const std::string& origin) {
    KvConfig out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError(origin + ":" + std::to_string(line_no) +
                                 ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ParseError(origin + ":" + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ParseError(origin + ":" + std::to_string(line_no) + ": empty key");
        // Strip a trailing comment outside quotes.
        if (!value.empty() && value.front() == '"') {
            const std::size_t close = value.find('"', 1);
            if (close == std::string::npos)
                throw ParseError(origin + ":" + std::to_string(line_no) +
                                 ": unterminated string value");
            value = value.substr(1, close - 1);
        } else {
            const std::size_t hash = value.find('#');
            if (hash != std::string::npos) value = trim(value.substr(0, hash));
            if (value.empty())
                throw ParseError(origin + ":" + std::to_string(line_no) + ": empty value");
        }
        out.values_[section.empty() ? key : section + "." + key] = value;
    }
    return out;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::int64_t v = 0;
    const char* begin = it->second.data();
    const char* end = begin + it->second.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end)
        throw ConfigError(key + ": not an integer: '" + it->second + "'");
    return v;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + it->second + "'");
    }
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw ConfigError(key + ": not a boolean: '" + it->second + "'");
}

std::optional<std::int64_t> KvConfig::get_optional_int(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_int(key, 0);
}

std::string KvConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

RunConfig RunConfig::from(const KvConfig& kv) {
    RunConfig c;
    c.interactions = kv.get_string("paths.interactions", c.interactions);
    c.metadata = kv.get_string("paths.metadata", c.metadata);
    c.workdir = kv.get_string("paths.workdir", c.workdir);
    c.report = kv.get_string("paths.report", c.report);

    const std::string kind = kv.get_string("provider.kind", "stub");
    if (kind == "stub")
        c.provider = ProviderKind::Stub;
    else if (kind == "remote")
        c.provider = ProviderKind::Remote;
    else
        throw ConfigError("provider.kind must be 'stub' or 'remote'");
    c.embed_endpoint = kv.get_string("provider.embed_endpoint", c.embed_endpoint);
    c.llm_endpoint = kv.get_string("provider.llm_endpoint", c.llm_endpoint);
    c.llm_model = kv.get_string("provider.llm_model", c.llm_model);
    c.concurrency = static_cast<int>(kv.get_int("provider.concurrency", c.concurrency));

    c.binarize_threshold =
        static_cast<int>(kv.get_int("params.binarize_threshold", c.binarize_threshold));
    c.window_start = kv.get_optional_int("params.window_start");
    c.min_interactions =
        static_cast<int>(kv.get_int("params.min_interactions", c.min_interactions));
    c.max_items = static_cast<int>(kv.get_int("params.max_items", c.max_items));

    c.train_end = kv.get_optional_int("split.train_end");
    c.val_end = kv.get_optional_int("split.val_end");

    c.d = static_cast<int>(kv.get_int("params.d", c.d));
    c.crm_epochs = static_cast<int>(kv.get_int("params.crm_epochs", c.crm_epochs));
    c.crm_lr = kv.get_double("params.crm_lr", c.crm_lr);
    c.crm_l2 = kv.get_double("params.crm_l2", c.crm_l2);
    const std::string mode = kv.get_string("params.crm_mode", "mean-of-items");
    if (mode == "mean-of-items")
        c.crm_mode = CrmMode::MeanOfItems;
    else if (mode == "user-factor")
        c.crm_mode = CrmMode::UserFactor;
    else
        throw ConfigError("crm_mode must be 'mean-of-items' or 'user-factor'");

    c.k_c = static_cast<int>(kv.get_int("params.k_c", c.k_c));
    c.tau_car = kv.get_double("params.tau_car", c.tau_car);
    c.car_epochs = static_cast<int>(kv.get_int("params.car_epochs", c.car_epochs));
    c.car_lr = kv.get_double("params.car_lr", c.car_lr);
    c.batch_size = static_cast<int>(kv.get_int("params.batch_size", c.batch_size));

    c.tau_sare = kv.get_double("params.tau_sare", c.tau_sare);
    c.sare_epochs = static_cast<int>(kv.get_int("params.sare_epochs", c.sare_epochs));
    c.sare_lr = kv.get_double("params.sare_lr", c.sare_lr);
    c.rank_threshold = static_cast<int>(kv.get_int("params.rank_threshold", c.rank_threshold));
    c.neg_count = static_cast<int>(kv.get_int("params.neg_count", c.neg_count));
    c.assess_sample = static_cast<int>(kv.get_int("params.assess_sample", c.assess_sample));

    c.k_e = static_cast<int>(kv.get_int("params.k_e", c.k_e));
    c.k_s = static_cast<int>(kv.get_int("params.k_s", c.k_s));
    c.embed_dim = static_cast<int>(kv.get_int("params.embed_dim", c.embed_dim));

    c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(c.seed)));
    return c;
}

void RunConfig::validate() const {
    if (k_c < 1) throw ConfigError("k_c must be >= 1");
    if (k_e < 1) throw ConfigError("k_e must be >= 1");
    if (k_s < 0) throw ConfigError("k_s must be >= 0");
    if (tau_car <= 0) throw ConfigError("tau_car must be > 0");
    if (tau_sare <= 0) throw ConfigError("tau_sare must be > 0");
    if (rank_threshold < 1) throw ConfigError("rank_threshold must be >= 1");
    if (neg_count < 1) throw ConfigError("neg_count must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (embed_dim < 2) throw ConfigError("embed_dim must be >= 2");
    if (max_items < 1) throw ConfigError("max_items must be >= 1");
    if (d < 1) throw ConfigError("d must be >= 1");
    if (crm_lr <= 0) throw ConfigError("crm_lr must be > 0");
    if (crm_l2 < 0) throw ConfigError("crm_l2 must be >= 0");
    if (crm_epochs < 0) throw ConfigError("crm_epochs must be >= 0");
    if (car_epochs < 0) throw ConfigError("car_epochs must be >= 0");
    if (car_lr < 0) throw ConfigError("car_lr must be >= 0");
    if (sare_epochs < 0) throw ConfigError("sare_epochs must be >= 0");
    if (sare_lr < 0) throw ConfigError("sare_lr must be >= 0");
    if (assess_sample < 1) throw ConfigError("assess_sample must be >= 1");
    if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
    if (min_interactions < 0) throw ConfigError("min_interactions must be >= 0");
    if (binarize_threshold < 1 || binarize_threshold > 5)
        throw ConfigError("binarize_threshold must be in [1,5]");
    if (train_end && val_end && *train_end >= *val_end)
        throw ConfigError("train_end must be < val_end");
    if (provider == ProviderKind::Remote) {
        if (embed_endpoint.empty()) throw ConfigError("embed_endpoint required for remote");
        if (llm_endpoint.empty()) throw ConfigError("llm_endpoint required for remote");
    }
}

std::string RunConfig::digest() const {
    char buf[64];
    std::string canon;
    auto add = [&](const char* key, const std::string& value) {
        canon += key;
        canon += '=';
        canon += value;
        canon += '\n';
    };
    auto add_i = [&](const char* key, std::int64_t v) { add(key, std::to_string(v)); };
    auto add_f = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        add(key, buf);
    };
    add("provider", provider == ProviderKind::Stub ? "stub" : "remote");
    add_i("binarize_threshold", binarize_threshold);
    add_i("window_start", window_start.value_or(-1));
    add_i("min_interactions", min_interactions);
    add_i("max_items", max_items);
    add_i("train_end", train_end.value_or(-1));
    add_i("val_end", val_end.value_or(-1));
    add_i("d", d);
    add_i("crm_epochs", crm_epochs);
    add_f("crm_lr", crm_lr);
    add_f("crm_l2", crm_l2);
    add("crm_mode", crm_mode == CrmMode::MeanOfItems ? "mean-of-items" : "user-factor");
    add_i("k_c", k_c);
    add_f("tau_car", tau_car);
    add_i("car_epochs", car_epochs);
    add_f("car_lr", car_lr);
    add_i("batch_size", batch_size);
    add_f("tau_sare", tau_sare);
    add_i("sare_epochs", sare_epochs);
    add_f("sare_lr", sare_lr);
    add_i("rank_threshold", rank_threshold);
    add_i("neg_count", neg_count);
    add_i("assess_sample", assess_sample);
    add_i("k_e", k_e);
    add_i("k_s", k_s);
    add_i("embed_dim", embed_dim);
    add_i("seed", static_cast<std::int64_t>(seed));

    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon)));
    return buf;
}

}  // namespace score
