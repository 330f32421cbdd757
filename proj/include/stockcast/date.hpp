#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace stockcast {

/// Calendar day, stored as days since the Unix epoch.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Parses YYYY-MM-DD. Returns nullopt for anything else, including
    /// impossible days such as 2021-02-30.
    [[nodiscard]] static std::optional<Date> parse(std::string_view text);

    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] int year() const;
    [[nodiscard]] constexpr std::chrono::sys_days days() const { return days_; }
    [[nodiscard]] constexpr long serial() const { return days_.time_since_epoch().count(); }

    [[nodiscard]] Date plus_days(int n) const { return Date{days_ + std::chrono::days{n}}; }
    [[nodiscard]] bool is_weekend() const;

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace stockcast
