#include "tscl/tensor.hpp"

#include <numeric>
#include <sstream>

#include "tscl/errors.hpp"

namespace tscl {

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << 'x';
        os << s[i];
    }
    if (s.empty()) os << "scalar";
    return os.str();
}

static std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (int d : s) {
        if (d <= 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(s));
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    auto impl = std::make_shared<Impl>();
    impl->data.assign(shape_numel(shape), 0.0);
    impl->shape = std::move(shape);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    Tensor t = zeros(std::move(shape), requires_grad);
    std::fill(t.p_->data.begin(), t.p_->data.end(), value);
    return t;
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
    if (values.size() != shape_numel(shape))
        throw ShapeError("tensor init: " + std::to_string(values.size()) +
                         " values for shape " + shape_str(shape));
    auto impl = std::make_shared<Impl>();
    impl->shape = std::move(shape);
    impl->data = std::move(values);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return from({1}, {value}, requires_grad);
}

const Shape& Tensor::shape() const { return p_->shape; }

int Tensor::dim(int i) const { return p_->shape.at(static_cast<std::size_t>(i)); }

int Tensor::ndim() const { return static_cast<int>(p_->shape.size()); }

std::size_t Tensor::numel() const { return p_->data.size(); }

double* Tensor::data() { return p_->data.data(); }
const double* Tensor::data() const { return p_->data.data(); }

bool Tensor::requires_grad() const { return p_->requires_grad; }
void Tensor::set_requires_grad(bool rg) { p_->requires_grad = rg; }

bool Tensor::has_grad() const { return !p_->grad.empty(); }

void Tensor::ensure_grad() {
    if (p_->grad.empty()) p_->grad.assign(p_->data.size(), 0.0);
}

double* Tensor::grad() { return p_->grad.empty() ? nullptr : p_->grad.data(); }
const double* Tensor::grad() const { return p_->grad.empty() ? nullptr : p_->grad.data(); }

void Tensor::zero_grad() {
    std::fill(p_->grad.begin(), p_->grad.end(), 0.0);
}

double Tensor::item() const {
    if (numel() != 1)
        throw ShapeError("item() on tensor of shape " + shape_str(p_->shape));
    return p_->data[0];
}

Tensor Tensor::detach() const {
    auto impl = std::make_shared<Impl>();
    impl->shape = p_->shape;
    impl->data = p_->data;
    impl->requires_grad = false;
    return Tensor(std::move(impl));
}

Tensor Tensor::clone() const {
    auto impl = std::make_shared<Impl>();
    impl->shape = p_->shape;
    impl->data = p_->data;
    impl->requires_grad = p_->requires_grad;
    return Tensor(std::move(impl));
}

namespace {
thread_local Tape* g_current_tape = nullptr;
}

Tape::Tape() : prev_(g_current_tape) { g_current_tape = this; }

Tape::~Tape() { g_current_tape = prev_; }

Tape* Tape::current() { return g_current_tape; }

void Tape::record(std::function<void()> backward_fn) {
    nodes_.push_back(std::move(backward_fn));
}

void Tape::backward(Tensor root) {
    if (root.numel() != 1)
        throw ShapeError("backward() root must be scalar, got shape " + shape_str(root.shape()));
    root.ensure_grad();
    root.grad()[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
}

} // namespace tscl
