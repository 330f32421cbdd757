#include "stockcast/cli/config.hpp"

#include "stockcast/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

namespace stockcast::cli {

namespace fs = std::filesystem;
using boost::property_tree::ptree;

std::string to_string(PortfolioKind kind) {
    switch (kind) {
        case PortfolioKind::EqualWeight: return "equal_weight";
        case PortfolioKind::MinVariance: return "min_variance";
        case PortfolioKind::MaxSharpe: return "max_sharpe";
    }
    return "?";
}

std::optional<PortfolioKind> parse_portfolio_kind(std::string_view text) {
    if (text == "equal_weight") return PortfolioKind::EqualWeight;
    if (text == "min_variance") return PortfolioKind::MinVariance;
    if (text == "max_sharpe") return PortfolioKind::MaxSharpe;
    return std::nullopt;
}

bool is_forecast_model(std::string_view name) {
    return name == "ses" || name == "holt" || name == "hw_additive" ||
           name == "hw_multiplicative" || name == "arima";
}

std::vector<std::string> RunConfig::symbols() const {
    std::vector<std::string> out;
    for (const auto& sector : universe) {
        out.insert(out.end(), sector.symbols.begin(), sector.symbols.end());
    }
    return out;
}

std::string RunConfig::sector_of(const std::string& symbol) const {
    for (const auto& sector : universe) {
        if (std::ranges::find(sector.symbols, symbol) != sector.symbols.end()) return sector.name;
    }
    return {};
}

namespace {

[[noreturn]] void fail(const std::string& message) {
    throw Error(ErrorKind::Config, message);
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = trim(std::string_view(text).substr(
            start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const auto s = trim(text);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        fail(key + ": not a number: '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const auto s = trim(text);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(key + ": not a boolean: '" + text + "'");
}

fs::path resolve(const fs::path& base, const std::string& text) {
    fs::path p(trim(text));
    return p.is_absolute() ? p : (base / p).lexically_normal();
}

void apply_data(RunConfig& c, const ptree& section, const fs::path& base) {
    for (const auto& [key, node] : section) {
        const auto v = node.data();
        const auto name = "data." + key;
        if (key == "dir") {
            c.data_dir = resolve(base, v);
        } else if (key == "calendar") {
            c.calendar = trim(v).empty() ? fs::path{} : resolve(base, v);
        } else if (key == "split_date") {
            const auto d = Date::parse(trim(v));
            if (!d) fail(name + ": not an ISO date: '" + v + "'");
            c.split_date = *d;
        } else {
            fail("unknown key " + name);
        }
    }
}

void apply_forecast(RunConfig& c, const ptree& section) {
    for (const auto& [key, node] : section) {
        const auto v = node.data();
        const auto name = "forecast." + key;
        if (key == "model") c.forecast_model = trim(v);
        else if (key == "horizon") c.horizon = parse_number<int>(name, v);
        else if (key == "season_length") c.season_length = parse_number<int>(name, v);
        else if (key == "max_p") c.arima.max_p = parse_number<int>(name, v);
        else if (key == "max_q") c.arima.max_q = parse_number<int>(name, v);
        else if (key == "max_d") c.arima.max_d = parse_number<int>(name, v);
        else fail("unknown key " + name);
    }
}

void apply_walkforward(RunConfig& c, const ptree& section) {
    for (const auto& [key, node] : section) {
        const auto v = node.data();
        const auto name = "walkforward." + key;
        if (key == "model") {
            c.walkforward_model = trim(v);
        } else if (key == "mode") {
            const auto mode = validation::parse_window_mode(trim(v));
            if (!mode) fail(name + ": expected rolling or sliding, got '" + v + "'");
            c.window.mode = *mode;
        } else if (key == "train") {
            c.window.train_size = parse_number<std::size_t>(name, v);
        } else if (key == "test") {
            c.window.test_size = parse_number<std::size_t>(name, v);
        } else if (key == "step") {
            c.window.step = parse_number<std::size_t>(name, v);
        } else {
            fail("unknown key " + name);
        }
    }
}

ml::ModelKind parse_kind(const std::string& name, const std::string& v) {
    const auto kind = ml::parse_model_kind(trim(v));
    if (!kind) fail(name + ": unknown model '" + v + "'");
    return *kind;
}

void apply_ml(RunConfig& c, const ptree& section) {
    auto& hp = c.hyperparameters;
    auto& f = c.features;
    for (const auto& [key, node] : section) {
        const auto v = node.data();
        const auto name = "ml." + key;
        if (key == "regressor") c.regressor = parse_kind(name, v);
        else if (key == "classifier") c.classifier = parse_kind(name, v);
        else if (key == "knn_k") hp.knn_k = parse_number<std::size_t>(name, v);
        else if (key == "max_depth") hp.tree_max_depth = parse_number<int>(name, v);
        else if (key == "min_samples_leaf") hp.min_samples_leaf = parse_number<std::size_t>(name, v);
        else if (key == "n_trees") hp.n_trees = parse_number<std::size_t>(name, v);
        else if (key == "max_features") hp.max_features = parse_number<std::size_t>(name, v);
        else if (key == "boost_rounds") hp.boost_rounds = parse_number<std::size_t>(name, v);
        else if (key == "learning_rate") hp.learning_rate = parse_number<double>(name, v);
        else if (key == "boost_max_depth") hp.boost_max_depth = parse_number<int>(name, v);
        else if (key == "logistic_iterations") hp.logistic_iterations = parse_number<std::size_t>(name, v);
        else if (key == "logistic_rate") hp.logistic_rate = parse_number<double>(name, v);
        else if (key == "price_features") {
            f.open = f.high = f.low = f.close = f.volume = false;
            for (const auto& item : split_list(v)) {
                if (item == "open") f.open = true;
                else if (item == "high") f.high = true;
                else if (item == "low") f.low = true;
                else if (item == "close") f.close = true;
                else if (item == "volume") f.volume = true;
                else fail(name + ": unknown column '" + item + "'");
            }
        } else if (key == "return_lags") {
            f.return_lags.clear();
            for (const auto& item : split_list(v)) f.return_lags.push_back(parse_number<int>(name, item));
        } else if (key == "rsi_period") {
            const int p = parse_number<int>(name, v);
            f.rsi_period = p == 0 ? std::nullopt : std::optional<int>(p);
        } else if (key == "ma_windows") {
            f.ma_windows.clear();
            for (const auto& item : split_list(v)) f.ma_windows.push_back(parse_number<int>(name, item));
        } else {
            fail("unknown key " + name);
        }
    }
}

void apply_portfolio(RunConfig& c, const ptree& section) {
    for (const auto& [key, node] : section) {
        const auto v = node.data();
        const auto name = "portfolio." + key;
        if (key == "kind") {
            const auto kind = parse_portfolio_kind(trim(v));
            if (!kind) fail(name + ": unknown kind '" + v + "'");
            c.portfolio_kind = *kind;
        } else if (key == "budget") {
            c.budget = parse_number<double>(name, v);
        } else if (key == "risk_free_rate") {
            c.optimizer.risk_free_rate = parse_number<double>(name, v);
        } else if (key == "long_only") {
            c.optimizer.long_only = parse_bool(name, v);
        } else if (key == "samples") {
            c.optimizer.mc_samples = parse_number<std::size_t>(name, v);
        } else {
            fail("unknown key " + name);
        }
    }
}

void apply_run(RunConfig& c, const ptree& section, const fs::path& base) {
    for (const auto& [key, node] : section) {
        const auto v = node.data();
        const auto name = "run." + key;
        if (key == "seed") c.seed = parse_number<std::uint64_t>(name, v);
        else if (key == "threads") c.threads = parse_number<unsigned>(name, v);
        else if (key == "output_dir") c.output_dir = resolve(base, v);
        else fail("unknown key " + name);
    }
}

}  // namespace

RunConfig parse_config(std::istream& in, const fs::path& base_dir) {
    ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        fail(e.message() + " at line " + std::to_string(e.line()));
    }
    RunConfig c;
    for (const auto& [section, node] : tree) {
        if (!node.data().empty() && node.empty()) fail("key '" + section + "' outside any section");
        if (section == "data") apply_data(c, node, base_dir);
        else if (section == "universe") {
            for (const auto& [sector, list] : node) {
                c.universe.push_back({sector, split_list(list.data())});
            }
        } else if (section == "forecast") apply_forecast(c, node);
        else if (section == "walkforward") apply_walkforward(c, node);
        else if (section == "ml") apply_ml(c, node);
        else if (section == "portfolio") apply_portfolio(c, node);
        else if (section == "run") apply_run(c, node, base_dir);
        else fail("unknown section [" + section + "]");
    }
    if (c.data_dir.empty()) fail("data.dir is required");
    if (c.split_date == Date{}) fail("data.split_date is required");
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path.string());
    auto dir = path.parent_path();
    if (dir.empty()) dir = ".";
    auto config = parse_config(in, dir);
    config.validate();
    return config;
}

void RunConfig::validate() const {
    if (!fs::is_directory(data_dir)) fail("data.dir does not exist: " + data_dir.string());
    if (!calendar.empty() && !fs::is_regular_file(calendar)) {
        fail("data.calendar does not exist: " + calendar.string());
    }
    if (universe.empty()) fail("[universe] lists no sectors");
    std::set<std::string> seen;
    for (const auto& sector : universe) {
        if (sector.symbols.empty()) fail("sector '" + sector.name + "' lists no tickers");
        for (const auto& s : sector.symbols) {
            if (!seen.insert(s).second) fail("ticker '" + s + "' listed twice");
            if (s.find_first_of("/\\") != std::string::npos) fail("bad ticker '" + s + "'");
        }
    }
    if (!is_forecast_model(forecast_model)) fail("forecast.model: unknown '" + forecast_model + "'");
    if (!is_forecast_model(walkforward_model)) {
        fail("walkforward.model: unknown '" + walkforward_model + "'");
    }
    if (horizon < 1) fail("forecast.horizon must be >= 1");
    if (season_length < 2) fail("forecast.season_length must be >= 2");
    if (arima.max_p < 0 || arima.max_q < 0 || arima.max_d < 0) fail("arima orders must be >= 0");
    try {
        window.validate();
    } catch (const Error& e) {
        fail(std::string("walkforward: ") + e.what());
    }
    if (features.empty()) fail("ml: feature set is empty");
    if (!(budget > 0.0)) fail("portfolio.budget must be positive");
    if (optimizer.mc_samples < 1) fail("portfolio.samples must be >= 1");
    if (threads < 1) fail("run.threads must be >= 1");
}

}  // namespace stockcast::cli
