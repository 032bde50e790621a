#include "tscl/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tscl/errors.hpp"

namespace tscl {

std::string GradCheckReport::to_string() const {
    std::ostringstream os;
    os << (pass ? "pass" : "FAIL") << " max_rel_err=" << max_rel_err << " over " << coords_checked
       << " coords";
    if (!failures.empty())
        os << "; worst at input " << worst.input << " coord " << worst.coord << " analytic "
           << worst.analytic << " numeric " << worst.numeric;
    return os.str();
}

GradCheckReport grad_check(const GradClosure& f, std::vector<Tensor> inputs,
                           const GradCheckOptions& opts) {
    GradCheckReport report;

    for (auto& in : inputs) {
        in.set_requires_grad(true);
        in.ensure_grad();
        in.zero_grad();
    }

    // Analytic pass.
    double base;
    {
        Tape tape;
        Tensor out = f(inputs);
        base = out.item();
        tape.backward(out);
    }
    std::vector<std::vector<double>> analytic;
    for (auto& in : inputs)
        analytic.emplace_back(in.grad(), in.grad() + in.numel());
    (void)base;

    // Numeric evaluations run without a tape.
    auto eval = [&]() { return f(inputs).item(); };

    Rng sampler(opts.sample_seed);
    for (int ii = 0; ii < static_cast<int>(inputs.size()); ++ii) {
        Tensor& in = inputs[static_cast<std::size_t>(ii)];
        std::vector<std::size_t> coords;
        if (opts.sample_per_input > 0 && opts.sample_per_input < in.numel()) {
            for (std::size_t s = 0; s < opts.sample_per_input; ++s)
                coords.push_back(static_cast<std::size_t>(
                    sampler.uniform_int(0, static_cast<std::int64_t>(in.numel()) - 1)));
        } else {
            coords.resize(in.numel());
            for (std::size_t c = 0; c < coords.size(); ++c) coords[c] = c;
        }

        for (std::size_t c : coords) {
            if (opts.skip && opts.skip(ii, c)) continue;
            const double saved = in.data()[c];
            in.data()[c] = saved + opts.h;
            const double fp = eval();
            in.data()[c] = saved - opts.h;
            const double fm = eval();
            in.data()[c] = saved;

            const double numeric = (fp - fm) / (2.0 * opts.h);
            const double a = analytic[static_cast<std::size_t>(ii)][c];
            const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-4});
            double rel = std::fabs(a - numeric) / denom;
            const bool finite = std::isfinite(a) && std::isfinite(numeric);
            if (!finite) rel = std::numeric_limits<double>::infinity();

            ++report.coords_checked;
            if (rel > report.max_rel_err || !finite) {
                report.max_rel_err = std::max(report.max_rel_err, rel);
                report.worst = {ii, c, a, numeric, rel};
            }
            if (rel > opts.tol || !finite)
                report.failures.push_back({ii, c, a, numeric, rel});
        }
    }

    report.pass = report.failures.empty() && std::isfinite(report.max_rel_err);
    return report;
}

} // namespace tscl
