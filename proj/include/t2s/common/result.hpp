#pragma once

#include <stdexcept>
#include <type_traits>
#include <utility>
#include <variant>

namespace t2s {

/// Placeholder value for fallible operations that produce nothing.
struct Unit {
    friend bool operator==(Unit, Unit) { return true; }
};

/// Value-or-error container. Either alternative is a normal value; callers
/// branch on ok() instead of catching. value()/error() on the wrong
/// alternative is a programming error and throws std::logic_error.
template <class T, class E>
class Result {
    static_assert(!std::is_same_v<T, E>, "value and error types must differ");

public:
    Result(T value) : state_(std::in_place_index<0>, std::move(value)) {}
    Result(E error) : state_(std::in_place_index<1>, std::move(error)) {}

    [[nodiscard]] bool ok() const noexcept { return state_.index() == 0; }
    explicit operator bool() const noexcept { return ok(); }

    T& value() & {
        check(true);
        return std::get<0>(state_);
    }
    const T& value() const& {
        check(true);
        return std::get<0>(state_);
    }
    T&& value() && {
        check(true);
        return std::get<0>(std::move(state_));
    }

    E& error() & {
        check(false);
        return std::get<1>(state_);
    }
    const E& error() const& {
        check(false);
        return std::get<1>(state_);
    }
    E&& error() && {
        check(false);
        return std::get<1>(std::move(state_));
    }

    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }
    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }

    template <class U>
    T value_or(U&& fallback) const& {
        return ok() ? std::get<0>(state_) : static_cast<T>(std::forward<U>(fallback));
    }

private:
    void check(bool wantValue) const {
        if (ok() != wantValue) {
            throw std::logic_error(wantValue ? "Result holds an error" : "Result holds a value");
        }
    }

    std::variant<T, E> state_;
};

}  // namespace t2s
