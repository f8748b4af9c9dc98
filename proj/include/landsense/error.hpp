#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace landsense {

enum class ErrorKind {
	invalid_spec,
	placement_failure,
	missing_category,
	out_of_bounds,
	invalid_n,
	invalid_category,
	nothing_to_balance,
	invalid_split,
	invalid_node,
	invalid_input,
	invalid_features,
	invalid_class,
	decode_failure,
	missing_file,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
	switch (kind) {
	case ErrorKind::invalid_spec: return "invalid-spec";
	case ErrorKind::placement_failure: return "placement-failure";
	case ErrorKind::missing_category: return "missing-category";
	case ErrorKind::out_of_bounds: return "out-of-bounds";
	case ErrorKind::invalid_n: return "invalid-N";
	case ErrorKind::invalid_category: return "invalid-category";
	case ErrorKind::nothing_to_balance: return "nothing-to-balance";
	case ErrorKind::invalid_split: return "invalid-split";
	case ErrorKind::invalid_node: return "invalid-node";
	case ErrorKind::invalid_input: return "invalid-input";
	case ErrorKind::invalid_features: return "invalid-features";
	case ErrorKind::invalid_class: return "invalid-class";
	case ErrorKind::decode_failure: return "decode-failure";
	case ErrorKind::missing_file: return "missing-file";
	}
	return "unknown";
}

/// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
public:
	Error(ErrorKind kind, const std::string& what)
	    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
	{
	}

	ErrorKind kind() const noexcept { return kind_; }

private:
	ErrorKind kind_;
};

} // namespace landsense
