#include "effbench/value.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "effbench/errors.hpp"

namespace effbench {

// ---------------------------------------------------------------- BigInt

BigInt::BigInt(std::int64_t v) : digits_(std::to_string(v)) {}
BigInt::BigInt(std::uint64_t v) : digits_(std::to_string(v)) {}

BigInt BigInt::from_string(std::string_view text) {
    std::string_view body = text;
    bool neg = false;
    if (!body.empty() && body.front() == '-') {
        neg = true;
        body.remove_prefix(1);
    }
    if (body.empty() || !std::all_of(body.begin(), body.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw ParseError("invalid integer literal '" + std::string(text) + "'");
    }
    auto first_nonzero = body.find_first_not_of('0');
    BigInt out;
    if (first_nonzero == std::string_view::npos) {
        out.digits_ = "0";
        return out;
    }
    body.remove_prefix(first_nonzero);
    out.digits_ = (neg ? "-" : "") + std::string(body);
    return out;
}

std::optional<std::int64_t> BigInt::to_int64() const {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(digits_.data(), digits_.data() + digits_.size(), v);
    if (ec != std::errc() || ptr != digits_.data() + digits_.size()) return std::nullopt;
    return v;
}

// ---------------------------------------------------------------- Value

namespace {

[[noreturn]] void kind_mismatch(const Value& v, const char* wanted) {
    throw ParseError(std::string("expected ") + wanted + ", found " + v.kind_name());
}

}  // namespace

bool Value::as_bool() const {
    if (!is_bool()) kind_mismatch(*this, "boolean");
    return std::get<bool>(v_);
}

const BigInt& Value::as_int() const {
    if (!is_int()) kind_mismatch(*this, "integer");
    return std::get<BigInt>(v_);
}

std::int64_t Value::as_int64() const {
    auto v = as_int().to_int64();
    if (!v) throw ParseError("integer " + as_int().str() + " does not fit in 64 bits");
    return *v;
}

double Value::as_double() const {
    if (is_float()) return std::get<double>(v_);
    if (is_int()) return std::strtod(std::get<BigInt>(v_).str().c_str(), nullptr);
    kind_mismatch(*this, "number");
}

const std::string& Value::as_string() const {
    if (!is_string()) kind_mismatch(*this, "string");
    return std::get<std::string>(v_);
}

const List& Value::as_list() const {
    if (!is_list()) kind_mismatch(*this, "list");
    return std::get<List>(v_);
}

List& Value::as_list() {
    if (!is_list()) kind_mismatch(*this, "list");
    return std::get<List>(v_);
}

const Map& Value::as_map() const {
    if (!is_map()) kind_mismatch(*this, "map");
    return std::get<Map>(v_);
}

Map& Value::as_map() {
    if (!is_map()) kind_mismatch(*this, "map");
    return std::get<Map>(v_);
}

const Value* Value::find(std::string_view key) const {
    if (!is_map()) return nullptr;
    for (const auto& [k, v] : std::get<Map>(v_)) {
        if (k == key) return &v;
    }
    return nullptr;
}

const Value& Value::at(std::string_view key) const {
    if (!is_map()) kind_mismatch(*this, "map");
    if (const Value* v = find(key)) return *v;
    throw ParseError("missing field '" + std::string(key) + "'");
}

void Value::set(std::string key, Value value) {
    auto& m = as_map();
    for (auto& [k, v] : m) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    m.emplace_back(std::move(key), std::move(value));
}

const char* Value::kind_name() const noexcept {
    switch (v_.index()) {
        case 0: return "null";
        case 1: return "boolean";
        case 2: return "integer";
        case 3: return "float";
        case 4: return "string";
        case 5: return "list";
        default: return "map";
    }
}

bool operator==(const Value& a, const Value& b) {
    if (a.v_.index() != b.v_.index()) return false;
    if (a.is_map()) {
        const auto& ma = std::get<Map>(a.v_);
        const auto& mb = std::get<Map>(b.v_);
        if (ma.size() != mb.size()) return false;
        for (const auto& [k, v] : ma) {
            const Value* other = b.find(k);
            if (other == nullptr || !(v == *other)) return false;
        }
        return true;
    }
    return a.v_ == b.v_;
}

// ---------------------------------------------------------------- dump

namespace {

void escape_into(std::string& out, std::string_view s) {
    out.push_back('"');
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    out.push_back('"');
}

void float_into(std::string& out, double d) {
    if (!std::isfinite(d)) throw ParameterError("cannot encode non-finite float");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
    std::string_view text(buf, static_cast<std::size_t>(ptr - buf));
    out += text;
    if (text.find_first_of(".eE") == std::string_view::npos) out += ".0";
}

class Dumper {
public:
    explicit Dumper(const DumpOptions& opts) : opts_(opts) {}

    void write(std::string& out, const Value& v, int depth, bool compact) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, std::nullptr_t>) {
                    out += "null";
                } else if constexpr (std::is_same_v<T, bool>) {
                    out += x ? "true" : "false";
                } else if constexpr (std::is_same_v<T, BigInt>) {
                    out += x.str();
                } else if constexpr (std::is_same_v<T, double>) {
                    float_into(out, x);
                } else if constexpr (std::is_same_v<T, std::string>) {
                    escape_into(out, x);
                } else if constexpr (std::is_same_v<T, List>) {
                    write_list(out, x, depth, compact);
                } else {
                    write_map(out, x, depth, compact);
                }
            },
            v.storage());
    }

private:
    bool pretty(bool compact) const { return opts_.indent > 0 && !compact; }

    void newline(std::string& out, int depth) const {
        out.push_back('\n');
        out.append(static_cast<std::size_t>(depth * opts_.indent), ' ');
    }

    void write_list(std::string& out, const List& l, int depth, bool compact) {
        out.push_back('[');
        // Lists of scalars stay on one line even in pretty mode.
        bool nested = std::any_of(l.begin(), l.end(), [](const Value& e) { return e.is_list() || e.is_map(); });
        bool multiline = pretty(compact) && nested;
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (i > 0) out += multiline ? "," : (pretty(compact) ? ", " : ",");
            if (multiline) newline(out, depth + 1);
            write(out, l[i], depth + 1, compact);
        }
        if (multiline) newline(out, depth);
        out.push_back(']');
    }

    void write_map(std::string& out, const Map& m, int depth, bool compact) {
        out.push_back('{');
        bool multiline = pretty(compact) && !m.empty();
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i > 0) out.push_back(',');
            if (multiline) newline(out, depth + 1);
            escape_into(out, m[i].first);
            out += multiline ? ": " : ":";
            bool child_compact = compact || std::find(opts_.compact_keys.begin(), opts_.compact_keys.end(),
                                                      m[i].first) != opts_.compact_keys.end();
            write(out, m[i].second, depth + 1, child_compact);
        }
        if (multiline) newline(out, depth);
        out.push_back('}');
    }

    const DumpOptions& opts_;
};

}  // namespace

std::string dump(const Value& value, const DumpOptions& options) {
    std::string out;
    Dumper(options).write(out, value, 0, false);
    return out;
}

// ---------------------------------------------------------------- parse

namespace {

constexpr int kMaxDepth = 512;

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Value document() {
        skip_ws();
        Value v = value(0);
        skip_ws();
        if (pos_ != s_.size()) fail("trailing characters after document");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) {
            if (s_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                         what);
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }

    void skip_ws() {
        while (!eof() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) ++pos_;
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void literal(std::string_view word) {
        if (s_.substr(pos_, word.size()) != word) fail("invalid literal");
        pos_ += word.size();
    }

    Value value(int depth) {
        if (depth > kMaxDepth) fail("nesting too deep");
        switch (peek()) {
            case '{': return object(depth);
            case '[': return array(depth);
            case '"': return Value(string());
            case 't': literal("true"); return Value(true);
            case 'f': literal("false"); return Value(false);
            case 'n': literal("null"); return Value(nullptr);
            default:
                if (peek() == '-' || (peek() >= '0' && peek() <= '9')) return number();
                if (eof()) fail("unexpected end of input");
                fail(std::string("unexpected character '") + peek() + "'");
        }
    }

    Value object(int depth) {
        expect('{');
        Map m;
        skip_ws();
        if (peek() == '}') {
            ++pos_;
            return Value(std::move(m));
        }
        while (true) {
            skip_ws();
            if (peek() != '"') fail("expected object key");
            std::string key = string();
            for (const auto& kv : m) {
                if (kv.first == key) fail("duplicate key '" + key + "'");
            }
            skip_ws();
            expect(':');
            skip_ws();
            Value v = value(depth + 1);
            m.emplace_back(std::move(key), std::move(v));
            skip_ws();
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            expect('}');
            return Value(std::move(m));
        }
    }

    Value array(int depth) {
        expect('[');
        List l;
        skip_ws();
        if (peek() == ']') {
            ++pos_;
            return Value(std::move(l));
        }
        while (true) {
            skip_ws();
            l.push_back(value(depth + 1));
            skip_ws();
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            expect(']');
            return Value(std::move(l));
        }
    }

    unsigned hex4() {
        if (pos_ + 4 > s_.size()) fail("truncated \\u escape");
        unsigned cp = 0;
        for (int i = 0; i < 4; ++i) {
            char c = s_[pos_++];
            cp <<= 4;
            if (c >= '0' && c <= '9') cp |= static_cast<unsigned>(c - '0');
            else if (c >= 'a' && c <= 'f') cp |= static_cast<unsigned>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') cp |= static_cast<unsigned>(c - 'A' + 10);
            else fail("invalid \\u escape");
        }
        return cp;
    }

    static void utf8_into(std::string& out, unsigned cp) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }

    std::string string() {
        expect('"');
        std::string out;
        while (true) {
            if (eof()) fail("unterminated string");
            char c = s_[pos_++];
            if (c == '"') return out;
            if (static_cast<unsigned char>(c) < 0x20) fail("control character in string");
            if (c != '\\') {
                out.push_back(c);
                continue;
            }
            if (eof()) fail("unterminated escape");
            char e = s_[pos_++];
            switch (e) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case '/': out.push_back('/'); break;
                case 'b': out.push_back('\b'); break;
                case 'f': out.push_back('\f'); break;
                case 'n': out.push_back('\n'); break;
                case 'r': out.push_back('\r'); break;
                case 't': out.push_back('\t'); break;
                case 'u': {
                    unsigned cp = hex4();
                    if (cp >= 0xD800 && cp <= 0xDBFF) {
                        if (s_.substr(pos_, 2) != "\\u") fail("unpaired surrogate");
                        pos_ += 2;
                        unsigned lo = hex4();
                        if (lo < 0xDC00 || lo > 0xDFFF) fail("invalid low surrogate");
                        cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                    } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
                        fail("unpaired surrogate");
                    }
                    utf8_into(out, cp);
                    break;
                }
                default: fail("invalid escape");
            }
        }
    }

    Value number() {
        std::size_t start = pos_;
        if (peek() == '-') ++pos_;
        if (peek() == '0') {
            ++pos_;
        } else if (peek() >= '1' && peek() <= '9') {
            while (peek() >= '0' && peek() <= '9') ++pos_;
        } else {
            fail("invalid number");
        }
        bool is_float = false;
        if (peek() == '.') {
            is_float = true;
            ++pos_;
            if (!(peek() >= '0' && peek() <= '9')) fail("invalid number");
            while (peek() >= '0' && peek() <= '9') ++pos_;
        }
        if (peek() == 'e' || peek() == 'E') {
            is_float = true;
            ++pos_;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (!(peek() >= '0' && peek() <= '9')) fail("invalid number");
            while (peek() >= '0' && peek() <= '9') ++pos_;
        }
        std::string_view text = s_.substr(start, pos_ - start);
        if (!is_float) return Value(BigInt::from_string(text));
        double d = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
        if (ec == std::errc::result_out_of_range || !std::isfinite(d)) {
            pos_ = start;
            fail("float literal out of range");
        }
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            pos_ = start;
            fail("invalid number");
        }
        return Value(d);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Value parse_value(std::string_view text) { return Parser(text).document(); }

}  // namespace effbench
