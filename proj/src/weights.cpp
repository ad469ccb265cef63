#include <quadtwist/error.hpp>
#include <quadtwist/weights.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace quadtwist
{

double bump(double t)
{
    if (t <= 0 || t >= 1) {
        return 0;
    }
    return std::exp(-1 / (t * (1 - t)));
}

double bump_mass()
{
    static const double mass = integrate([](double t) { return bump(t); }, 0, 1,
                                         {.abs_tol = 1e-18, .initial_panels = 8});
    return mass;
}

namespace
{

constexpr int step_panels = 1024;

// Cumulative bump integral on [0, 1/2] at the panel edges.
const std::vector<double> &step_table()
{
    static const std::vector<double> table = [] {
        const GaussRule &rule = gauss_legendre(16);
        std::vector<double> cum(step_panels + 1, 0.0);
        double h = 0.5 / step_panels;
        for (int i = 0; i < step_panels; ++i) {
            cum[i + 1] = cum[i] + gl_panel([](double u) { return bump(u); }, i * h, (i + 1) * h, rule);
        }
        return cum;
    }();
    return table;
}

double lower_step(double t)
{
    const auto &cum = step_table();
    double h = 0.5 / step_panels;
    int i = std::min(static_cast<int>(t / h), step_panels - 1);
    double part = gl_panel([](double u) { return bump(u); }, i * h, t, gauss_legendre(16));
    return (cum[i] + part) / bump_mass();
}

} // namespace

double smoothstep(double t)
{
    if (t <= 0) {
        return 0;
    }
    if (t >= 1) {
        return 1;
    }
    if (t <= 0.5) {
        return lower_step(t);
    }
    return 1 - lower_step(1 - t);
}

struct SmoothWeight::TrapezoidLevel
{
    double x0 = 0;
    double h = 0;
    double t_max = 0;
    std::vector<double> amp;
};

struct TrapezoidCache
{
    std::mutex mutex;
    std::vector<std::unique_ptr<SmoothWeight::TrapezoidLevel>> levels;
};

namespace
{

// Frequency beyond which the transforms are below double precision.
constexpr double bandwidth = 4000;

} // namespace

SmoothWeight::SmoothWeight(Kind k, double lo, double hi, double delta, std::string cert)
    : kind_(k), lo_(lo), hi_(hi), delta_(delta), certificate_(std::move(cert)),
      cache_(std::make_shared<TrapezoidCache>())
{
}

const SmoothWeight::TrapezoidLevel &SmoothWeight::level_for(double t) const
{
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto &levels = cache_->levels;
    for (const auto &lv : levels) {
        if (lv->t_max >= t) {
            return *lv;
        }
    }
    double t_max = levels.empty() ? bandwidth : 2 * levels.back()->t_max + bandwidth;
    while (t_max < t) {
        t_max = 2 * t_max + bandwidth;
    }
    auto lv = std::make_unique<TrapezoidLevel>();
    double x_lo = std::log(lo_);
    double x_hi = std::log(hi_);
    auto n = static_cast<std::size_t>(std::ceil((x_hi - x_lo) * (t_max + bandwidth) / (2 * pi)));
    lv->h = (x_hi - x_lo) / n;
    lv->x0 = x_lo;
    lv->t_max = t_max;
    lv->amp.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        lv->amp[j] = (*this)(std::exp(x_lo + j * lv->h)) * lv->h;
    }
    levels.push_back(std::move(lv));
    return *levels.back();
}

SmoothWeight SmoothWeight::psi()
{
    return SmoothWeight(Kind::psi, 1, 2, 0, "exp(-1/((x-1)(2-x))) on (1,2): flat bump, all derivatives vanish at 1 and 2");
}

SmoothWeight SmoothWeight::plateau(double delta)
{
    if (!(delta > 0 && delta < 0.25)) {
        throw ParameterError("plateau ramp delta must lie in (0, 1/4)");
    }
    return SmoothWeight(Kind::plateau, delta, 1, delta,
                        "1 on [2d, 1-d], bump-integral smoothstep ramps on [d, 2d] and [1-d, 1]");
}

SmoothWeight make_psi()
{
    return SmoothWeight::psi();
}

SmoothWeight make_w(double delta)
{
    return SmoothWeight::plateau(delta);
}

double SmoothWeight::operator()(double x) const
{
    if (x <= lo_ || x >= hi_) {
        return 0;
    }
    if (kind_ == Kind::psi) {
        return std::exp(-1 / ((x - 1) * (2 - x)));
    }
    if (x < 2 * delta_) {
        return smoothstep((x - delta_) / delta_);
    }
    if (x > 1 - delta_) {
        return smoothstep((1 - x) / delta_);
    }
    return 1;
}

double SmoothWeight::derivative(double x) const
{
    if (x <= lo_ || x >= hi_) {
        return 0;
    }
    if (kind_ == Kind::psi) {
        double g = (x - 1) * (2 - x);
        return std::exp(-1 / g) * (3 - 2 * x) / (g * g);
    }
    if (x < 2 * delta_) {
        return bump((x - delta_) / delta_) / (delta_ * bump_mass());
    }
    if (x > 1 - delta_) {
        return -bump((1 - x) / delta_) / (delta_ * bump_mass());
    }
    return 0;
}

std::vector<std::pair<double, double>> SmoothWeight::derivative_support() const
{
    if (kind_ == Kind::psi) {
        return {{1, 2}};
    }
    return {{delta_, 2 * delta_}, {1 - delta_, 1}};
}

Complex SmoothWeight::mellin(Complex s) const
{
    const TrapezoidLevel &lv = level_for(std::abs(s.imag()));
    Complex ratio = std::exp(s * lv.h);
    Complex acc = 0;
    Complex z;
    for (std::size_t j = 0; j < lv.amp.size(); ++j) {
        if (j % 64 == 0) {
            z = std::exp(s * (lv.x0 + j * lv.h));
        }
        acc += lv.amp[j] * z;
        z *= ratio;
    }
    return acc;
}

Complex SmoothWeight::mellin_adaptive(Complex s, double abs_tol) const
{
    double t = std::abs(s.imag());
    auto panels = [&](double a, double b) {
        return 1 + static_cast<int>(t * (std::log(b) - std::log(a)) / 4);
    };
    if (std::abs(s) < 1) {
        // Direct transform; the plateau part of W is integrated exactly.
        auto direct = [&](double a, double b) {
            return integrate(
                [&](double x) {
                    double u = std::exp(x);
                    return (*this)(u) * std::exp(s * x);
                },
                std::log(a), std::log(b), {.abs_tol = abs_tol, .initial_panels = panels(a, b)});
        };
        if (kind_ == Kind::psi) {
            return direct(1, 2);
        }
        double a = 2 * delta_;
        double b = 1 - delta_;
        double la = std::log(a);
        double lb = std::log(b);
        Complex flat;
        if (std::abs(s) < 1e-4) {
            flat = (lb - la) * (1.0 + s * (la + lb) / 2.0 + s * s * (la * la + la * lb + lb * lb) / 6.0);
        } else {
            flat = (std::exp(s * lb) - std::exp(s * la)) / s;
        }
        return direct(delta_, a) + flat + direct(b, 1);
    }
    // By parts: -(1/s) * integral of F'(u) u^s du over the derivative support.
    Complex acc = 0;
    for (auto [a, b] : derivative_support()) {
        acc += integrate(
            [&](double x) {
                double u = std::exp(x);
                return derivative(u) * std::exp((s + 1.0) * x);
            },
            std::log(a), std::log(b), {.abs_tol = abs_tol * std::abs(s), .initial_panels = panels(a, b)});
    }
    return -acc / s;
}

double tilde_psi(const SmoothWeight &psi, double x)
{
    int panels = 2 + static_cast<int>(std::abs(x) * (psi.upper() - psi.lower()) * 2);
    return integrate(
        [&](double u) {
            double ph = 2 * pi * x * u;
            return psi(u) * (std::cos(ph) + std::sin(ph));
        },
        psi.lower(), psi.upper(), {.abs_tol = 1e-17, .initial_panels = panels});
}

TildePsiTable::TildePsiTable() : range_(64), width_(0.25), degree_(24)
{
    SmoothWeight psi = make_psi();
    int n_panels = static_cast<int>(range_ / width_);
    int n = degree_ + 1;
    cos_coef_.assign(static_cast<std::size_t>(n_panels) * n, 0);
    sin_coef_.assign(static_cast<std::size_t>(n_panels) * n, 0);
    std::vector<double> fc(n), fs(n);
    for (int k = 0; k < n_panels; ++k) {
        double lo = k * width_;
        for (int j = 0; j < n; ++j) {
            double node = std::cos(pi * (j + 0.5) / n);
            double x = lo + 0.5 * width_ * (node + 1);
            int panels = 2 + static_cast<int>(x * 2);
            fc[j] = integrate([&](double u) { return psi(u) * std::cos(2 * pi * x * u); }, 1, 2,
                              {.abs_tol = 1e-18, .initial_panels = panels});
            fs[j] = integrate([&](double u) { return psi(u) * std::sin(2 * pi * x * u); }, 1, 2,
                              {.abs_tol = 1e-18, .initial_panels = panels});
        }
        for (int m = 0; m < n; ++m) {
            double ac = 0, as = 0;
            for (int j = 0; j < n; ++j) {
                double c = std::cos(pi * m * (j + 0.5) / n);
                ac += fc[j] * c;
                as += fs[j] * c;
            }
            double scale = (m == 0 ? 1.0 : 2.0) / n;
            cos_coef_[static_cast<std::size_t>(k) * n + m] = ac * scale;
            sin_coef_[static_cast<std::size_t>(k) * n + m] = as * scale;
        }
    }
}

const TildePsiTable &TildePsiTable::instance()
{
    static const TildePsiTable table;
    return table;
}

double TildePsiTable::eval(const std::vector<double> &coef, double x) const
{
    int n = degree_ + 1;
    int k = std::min(static_cast<int>(x / width_), static_cast<int>(range_ / width_) - 1);
    double lo = k * width_;
    double y = 2 * (x - lo) / width_ - 1;
    const double *c = coef.data() + static_cast<std::size_t>(k) * n;
    double b1 = 0, b2 = 0;
    for (int m = n - 1; m >= 1; --m) {
        double b0 = 2 * y * b1 - b2 + c[m];
        b2 = b1;
        b1 = b0;
    }
    return y * b1 - b2 + c[0];
}

double TildePsiTable::operator()(double x) const
{
    double ax = std::abs(x);
    if (ax >= range_) {
        return 0;
    }
    double c = eval(cos_coef_, ax);
    double s = eval(sin_coef_, ax);
    return x >= 0 ? c + s : c - s;
}

TransformGrid vertical_line_grid(const SmoothWeight &f, double a, double tail_tol, const GridOptions &opt)
{
    if (!(tail_tol > 0)) {
        throw ParameterError("tail tolerance must be positive");
    }
    for (Complex p : opt.poles) {
        if (std::abs(a - p.real()) < 1e-9) {
            throw ParameterError("integrand pole lies on the contour line");
        }
    }
    auto mag = [&](double t) { return std::abs(f.mellin(Complex(a, t))); };
    // Values this small are roundoff in the trapezoid sum.
    double floor = 1e3 * std::numeric_limits<double>::epsilon() * mag(0);
    double t_cut = 0;
    int quiet = 0;
    double first_quiet = 0;
    for (int j = 0; j < 24; ++j) {
        double lo = j == 0 ? 0 : std::ldexp(1.0, j - 1);
        double hi = std::ldexp(1.0, j);
        double peak = 0;
        for (int i = 0; i <= 16; ++i) {
            peak = std::max(peak, mag(lo + (hi - lo) * i / 16));
        }
        if (peak * (hi - lo) < tail_tol / 4 || peak < floor) {
            if (quiet == 0) {
                first_quiet = lo;
            }
            if (++quiet == 3) {
                t_cut = std::max(first_quiet, 1.0);
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if (t_cut == 0) {
        throw ConvergenceError("Mellin transform did not decay below the tail tolerance");
    }
    double span = std::max(std::abs(std::log(f.lower())), std::abs(std::log(f.upper())));
    double freq = opt.log_scale + span;
    double h = std::min(2.0, 12.0 / std::max(freq, 1e-9));
    // Panel edges: width h, no wider than the distance to any pole.
    std::vector<double> edges{0.0};
    while (edges.back() < t_cut) {
        double t = edges.back();
        double width = h;
        for (Complex p : opt.poles) {
            double dx = std::abs(a - p.real());
            double gap = t - std::abs(p.imag());
            width = std::min(width, std::max(dx, gap >= 0 ? gap : -gap / 2));
        }
        double next = t + width;
        if (next > t_cut - 1e-3 * width) {
            next = t_cut;
        }
        edges.push_back(next);
        if ((edges.size() - 1) * static_cast<std::size_t>(opt.order) > opt.max_nodes) {
            throw ConvergenceError("vertical-line grid exceeds node budget");
        }
    }
    const GaussRule &rule = gauss_legendre(opt.order);
    TransformGrid g;
    g.a = a;
    g.truncation = t_cut;
    g.panel_order = opt.order;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        double mid = 0.5 * (edges[k] + edges[k + 1]);
        double half = 0.5 * (edges[k + 1] - edges[k]);
        for (int i = 0; i < opt.order; ++i) {
            double t = mid + half * rule.x[i];
            g.t.push_back(t);
            g.weight.push_back(half * rule.w[i]);
            g.value.push_back(f.mellin(Complex(a, t)));
        }
    }
    return g;
}

} // namespace quadtwist
