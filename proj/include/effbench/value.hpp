#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace effbench {

// Integer of arbitrary magnitude, kept as its canonical decimal text.
// Test inputs and outputs are only compared and copied, never computed on,
// so no arithmetic is provided.
class BigInt {
public:
    BigInt() : digits_("0") {}
    explicit BigInt(std::int64_t v);
    explicit BigInt(std::uint64_t v);

    // Accepts an optional leading '-' followed by decimal digits.
    // Throws ParseError on anything else.
    static BigInt from_string(std::string_view text);

    const std::string& str() const noexcept { return digits_; }
    bool negative() const noexcept { return digits_.front() == '-'; }
    std::optional<std::int64_t> to_int64() const;

    friend bool operator==(const BigInt&, const BigInt&) = default;

private:
    std::string digits_;
};

class Value;

using List = std::vector<Value>;
// Insertion-ordered string-keyed map; keys are unique.
using Map = std::vector<std::pair<std::string, Value>>;

// Canonical value tree: the encoding shared by manifests, runner jobs,
// runner records and result files. Serialized as JSON text whose integer
// literals may exceed 64 bits.
class Value {
public:
    using Storage = std::variant<std::nullptr_t, bool, BigInt, double, std::string, List, Map>;

    Value() : v_(nullptr) {}
    Value(std::nullptr_t) : v_(nullptr) {}
    Value(bool b) : v_(b) {}
    Value(int i) : v_(BigInt(static_cast<std::int64_t>(i))) {}
    Value(std::int64_t i) : v_(BigInt(i)) {}
    Value(std::uint64_t i) : v_(BigInt(i)) {}
    Value(BigInt i) : v_(std::move(i)) {}
    Value(double d) : v_(d) {}
    Value(const char* s) : v_(std::string(s)) {}
    Value(std::string s) : v_(std::move(s)) {}
    Value(List l) : v_(std::move(l)) {}
    Value(Map m) : v_(std::move(m)) {}

    bool is_null() const noexcept { return std::holds_alternative<std::nullptr_t>(v_); }
    bool is_bool() const noexcept { return std::holds_alternative<bool>(v_); }
    bool is_int() const noexcept { return std::holds_alternative<BigInt>(v_); }
    bool is_float() const noexcept { return std::holds_alternative<double>(v_); }
    bool is_number() const noexcept { return is_int() || is_float(); }
    bool is_string() const noexcept { return std::holds_alternative<std::string>(v_); }
    bool is_list() const noexcept { return std::holds_alternative<List>(v_); }
    bool is_map() const noexcept { return std::holds_alternative<Map>(v_); }

    bool as_bool() const;
    const BigInt& as_int() const;
    std::int64_t as_int64() const;
    // Integers are widened; throws ParseError on non-numbers.
    double as_double() const;
    const std::string& as_string() const;
    const List& as_list() const;
    List& as_list();
    const Map& as_map() const;
    Map& as_map();

    // Map lookup; nullptr when absent or when this is not a map.
    const Value* find(std::string_view key) const;
    // Map lookup that throws ParseError naming the key when absent.
    const Value& at(std::string_view key) const;
    // Appends or replaces a key. Requires a map.
    void set(std::string key, Value value);

    const Storage& storage() const noexcept { return v_; }
    const char* kind_name() const noexcept;

    // Structural equality. Maps compare as key sets (order-insensitive);
    // integers and floats are never equal to each other.
    friend bool operator==(const Value& a, const Value& b);

private:
    Storage v_;
};

struct DumpOptions {
    // Spaces per nesting level; 0 emits a single line.
    int indent = 0;
    // Values under these keys are emitted on one line even when indenting.
    std::vector<std::string> compact_keys;
};

// Serializes to JSON text. Floats use the shortest round-trip form and
// always carry a '.' or exponent so they re-parse as floats.
// Throws ParameterError on NaN or infinity.
std::string dump(const Value& value, const DumpOptions& options = {});

// Parses one JSON document. Integer literals of any length become BigInt.
// Throws ParseError with line and column on malformed input.
Value parse_value(std::string_view text);

}  // namespace effbench
