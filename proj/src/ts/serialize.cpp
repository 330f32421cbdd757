#include "stockcast/ts/serialize.hpp"

#include "stockcast/error.hpp"

#include <nlohmann/json.hpp>

namespace stockcast::ts {

namespace {

template <class... F>
struct Overload : F... {
    using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

}  // namespace

std::vector<double> forecast(const ForecastModel& model, int h) {
    return std::visit(Overload{[h](const SesModel& m) { return ses_forecast(m, h); },
                               [h](const HoltModel& m) { return holt_forecast(m, h); },
                               [h](const HoltWintersModel& m) { return hw_forecast(m, h); },
                               [h](const ArimaModel& m) { return arima_forecast(m, h); }},
                      model);
}

void to_json(nlohmann::json& j, const ForecastModel& model) {
    j = std::visit(
        Overload{
            [](const SesModel& m) {
                return nlohmann::json{{"kind", "ses"},
                                      {"alpha", m.alpha},
                                      {"initial_forecast", m.initial_forecast},
                                      {"last_forecast", m.last_forecast},
                                      {"mse", m.mse},
                                      {"n_obs", m.n_obs}};
            },
            [](const HoltModel& m) {
                return nlohmann::json{{"kind", "holt"},   {"alpha", m.alpha}, {"beta", m.beta},
                                      {"level", m.level}, {"trend", m.trend}, {"mse", m.mse},
                                      {"n_obs", m.n_obs}};
            },
            [](const HoltWintersModel& m) {
                return nlohmann::json{
                    {"kind", m.kind == SeasonKind::Additive ? "hw_additive" : "hw_multiplicative"},
                    {"alpha", m.alpha},
                    {"beta", m.beta},
                    {"gamma", m.gamma},
                    {"season_length", m.season_length},
                    {"level", m.level},
                    {"trend", m.trend},
                    {"seasonal", m.seasonal},
                    {"mse", m.mse},
                    {"n_obs", m.n_obs}};
            },
            [](const ArimaModel& m) {
                return nlohmann::json{{"kind", "arima"},
                                      {"order", {m.order.p, m.order.d, m.order.q}},
                                      {"ar", m.ar},
                                      {"ma", m.ma},
                                      {"intercept", m.intercept},
                                      {"sigma2", m.sigma2},
                                      {"aic", m.aic},
                                      {"n_obs", m.n_obs},
                                      {"context", m.context}};
            }},
        model);
}

void from_json(const nlohmann::json& j, ForecastModel& model) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "ses") {
            SesModel m;
            j.at("alpha").get_to(m.alpha);
            j.at("initial_forecast").get_to(m.initial_forecast);
            j.at("last_forecast").get_to(m.last_forecast);
            j.at("mse").get_to(m.mse);
            j.at("n_obs").get_to(m.n_obs);
            model = m;
        } else if (kind == "holt") {
            HoltModel m;
            j.at("alpha").get_to(m.alpha);
            j.at("beta").get_to(m.beta);
            j.at("level").get_to(m.level);
            j.at("trend").get_to(m.trend);
            j.at("mse").get_to(m.mse);
            j.at("n_obs").get_to(m.n_obs);
            model = m;
        } else if (kind == "hw_additive" || kind == "hw_multiplicative") {
            HoltWintersModel m;
            m.kind = kind == "hw_additive" ? SeasonKind::Additive : SeasonKind::Multiplicative;
            j.at("alpha").get_to(m.alpha);
            j.at("beta").get_to(m.beta);
            j.at("gamma").get_to(m.gamma);
            j.at("season_length").get_to(m.season_length);
            j.at("level").get_to(m.level);
            j.at("trend").get_to(m.trend);
            j.at("seasonal").get_to(m.seasonal);
            j.at("mse").get_to(m.mse);
            j.at("n_obs").get_to(m.n_obs);
            if (m.season_length < 2 || m.seasonal.size() != static_cast<std::size_t>(m.season_length)) {
                throw Error(ErrorKind::Data, "forecast model json: seasonal state length mismatch");
            }
            model = m;
        } else if (kind == "arima") {
            ArimaModel m;
            const auto order = j.at("order").get<std::vector<int>>();
            if (order.size() != 3) {
                throw Error(ErrorKind::Data, "forecast model json: arima order needs 3 entries");
            }
            m.order = {order[0], order[1], order[2]};
            j.at("ar").get_to(m.ar);
            j.at("ma").get_to(m.ma);
            j.at("intercept").get_to(m.intercept);
            j.at("sigma2").get_to(m.sigma2);
            j.at("aic").get_to(m.aic);
            j.at("n_obs").get_to(m.n_obs);
            j.at("context").get_to(m.context);
            model = m;
        } else {
            throw Error(ErrorKind::Data, "forecast model json: unknown kind " + kind);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, std::string("forecast model json: ") + e.what());
    }
}

}  // namespace stockcast::ts
