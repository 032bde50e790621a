#pragma once
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tscl {

using Shape = std::vector<int>;

std::string shape_str(const Shape& s);

/// Dense double-precision n-d array with an optional gradient buffer.
/// Copies are shallow handles: two Tensor values may share storage, which is
/// what lets backward closures accumulate into the tensors the caller holds.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return static_cast<bool>(p_); }
    const Shape& shape() const;
    int dim(int i) const;
    int ndim() const;
    std::size_t numel() const;

    double* data();
    const double* data() const;

    bool requires_grad() const;
    void set_requires_grad(bool rg);

    bool has_grad() const;
    void ensure_grad();        // allocate a zero grad buffer if absent
    double* grad();            // null if absent
    const double* grad() const;
    void zero_grad();          // zero (not free) the buffer if present

    double item() const;       // requires numel() == 1

    /// Deep copy of the data, no grad, requires_grad = false.
    Tensor detach() const;
    /// Deep copy of data and flags (fresh storage).
    Tensor clone() const;

    bool same_storage(const Tensor& other) const { return p_ == other.p_; }

private:
    struct Impl {
        Shape shape;
        std::vector<double> data;
        std::vector<double> grad;
        bool requires_grad = false;
    };
    std::shared_ptr<Impl> p_;
    explicit Tensor(std::shared_ptr<Impl> p) : p_(std::move(p)) {}
};

/// Record of executed differentiable ops for one forward pass. Ops push their
/// backward closures while a Tape is in scope; backward() replays them in
/// reverse execution order, accumulating gradients additively.
class Tape {
public:
    Tape();
    ~Tape();
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    static Tape* current();

    void record(std::function<void()> backward_fn);
    /// Seeds d(root)/d(root) = 1 (root must be scalar) and replays the tape.
    void backward(Tensor root);
    std::size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

private:
    std::vector<std::function<void()>> nodes_;
    Tape* prev_ = nullptr;
};

} // namespace tscl
