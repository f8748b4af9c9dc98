#pragma once

#include "error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace landsense {

/// Landscape class codes. Street, Building, Barren and Other follow the usual survey
/// numbering; Forest has no standard code and is assigned 7 here.
enum class Category : std::uint8_t {
	Other = 0,
	Barren = 4,
	Forest = 7,
	Street = 11,
	Building = 15,
};

struct CategoryInfo {
	Category category;
	std::string_view name;
};

inline constexpr std::array<CategoryInfo, 5> category_registry{{
    {Category::Other, "other"},
    {Category::Barren, "barren"},
    {Category::Forest, "forest"},
    {Category::Street, "street"},
    {Category::Building, "building"},
}};

constexpr int code_of(Category c) noexcept { return static_cast<int>(c); }

constexpr bool is_registered(int code) noexcept
{
	return std::ranges::any_of(category_registry,
	                           [code](const CategoryInfo& info) { return code_of(info.category) == code; });
}

inline Category category_from_code(int code)
{
	if (!is_registered(code))
		throw Error(ErrorKind::invalid_category, "unregistered category code " + std::to_string(code));
	return static_cast<Category>(code);
}

constexpr std::string_view name_of(Category c) noexcept
{
	for (const auto& info : category_registry)
		if (info.category == c)
			return info.name;
	return "unknown";
}

/// Accepts either a registry name (case-insensitive) or a numeric code.
inline Category parse_category(std::string_view text)
{
	std::string lowered(text);
	std::ranges::transform(lowered, lowered.begin(), [](unsigned char ch) { return std::tolower(ch); });
	for (const auto& info : category_registry)
		if (info.name == lowered)
			return info.category;
	if (!lowered.empty() && std::ranges::all_of(lowered, [](unsigned char ch) { return std::isdigit(ch); }))
		return category_from_code(std::stoi(lowered));
	throw Error(ErrorKind::invalid_category, "unknown category '" + std::string(text) + "'");
}

} // namespace landsense
