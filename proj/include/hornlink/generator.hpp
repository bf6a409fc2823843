#pragma once

#include <coroutine>
#include <exception>
#include <memory>
#include <utility>

namespace hornlink {

// Minimal pull-based generator. next() resumes the coroutine until the next
// co_yield and returns false once it runs off the end; value()/take() read the
// current element, which stays valid until the following next(). Exceptions
// raised inside the coroutine re-throw from next(). Destroying the generator
// unwinds the suspended frame, which in turn destroys any child generators it
// holds — that is how an abandoned search is torn down.
//
// yield_value deliberately binds lvalues only, so every `co_yield x` names a
// local living in the coroutine frame and the promise can hold a plain
// pointer to it. Yielding a prvalue temporary must not compile: this
// toolchain re-destroys such temporaries with their pre-move contents when
// the frame resumes, which double-frees anything the consumer took over.
template <typename T>
class Generator {
public:
  struct promise_type {
    T* current = nullptr;
    std::exception_ptr error;

    Generator get_return_object() {
      return Generator(
          std::coroutine_handle<promise_type>::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    std::suspend_always yield_value(T& value) noexcept {
      current = std::addressof(value);
      return {};
    }
    void return_void() noexcept { current = nullptr; }
    void unhandled_exception() { error = std::current_exception(); }
  };

  Generator() = default;
  explicit Generator(std::coroutine_handle<promise_type> handle)
      : handle_(handle) {}

  Generator(Generator&& other) noexcept
      : handle_(std::exchange(other.handle_, {})) {}
  Generator& operator=(Generator&& other) noexcept {
    if (this != &other) {
      destroy();
      handle_ = std::exchange(other.handle_, {});
    }
    return *this;
  }
  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;
  ~Generator() { destroy(); }

  bool next() {
    if (!handle_ || handle_.done()) return false;
    handle_.promise().current = nullptr;
    handle_.resume();
    if (handle_.promise().error) {
      auto err = handle_.promise().error;
      handle_.promise().error = nullptr;
      std::rethrow_exception(err);
    }
    return handle_.promise().current != nullptr;
  }

  const T& value() const { return *handle_.promise().current; }
  T take() { return std::move(*handle_.promise().current); }

private:
  void destroy() {
    if (handle_) {
      handle_.destroy();
      handle_ = {};
    }
  }

  std::coroutine_handle<promise_type> handle_;
};

}  // namespace hornlink
