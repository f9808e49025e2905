#include "laxflow/flow.hpp"

#include "laxflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace laxflow {

namespace {

// Coefficients lo..hi of a product of matrix series given from exponents loA / loB.
std::vector<CMat> series_mul(const std::vector<CMat>& A, int loA, const std::vector<CMat>& B, int loB, int hi) {
    const auto l = A[0].rows();
    int lo = loA + loB;
    std::vector<CMat> out(static_cast<size_t>(std::max(0, hi - lo + 1)), CMat::Zero(l, l));
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t j = 0; j < B.size(); ++j) {
            int k = loA + static_cast<int>(i) + loB + static_cast<int>(j);
            if (k > hi) break;
            out[static_cast<size_t>(k - lo)] += A[i] * B[j];
        }
    return out;
}

int pole_bound(const MatrixFunc& m, const Place& p) {
    int b = 0;
    for (int i = 0; i < m.size(); ++i)
        for (int j = 0; j < m.size(); ++j) {
            const FFElement& e = m(i, j);
            if (e.is_zero()) continue;
            b = std::max(b, -expand(e, p, 0).val());
        }
    return b;
}

MatrixFunc assemble(const CurvePtr& c, int l, const std::vector<FFElement>& basis, const Eigen::VectorXcd& x) {
    const int N = static_cast<int>(basis.size());
    MatrixFunc m = MatrixFunc::zero(c, l);
    for (int i = 0; i < l; ++i)
        for (int k = 0; k < l; ++k) {
            FFElement acc = FFElement::zero(c);
            for (int n = 0; n < N; ++n) {
                cplx v = x((i * l + k) * N + n);
                if (std::abs(v) < 1e-15) continue;
                acc = acc + basis[static_cast<size_t>(n)] * v;
            }
            m(i, k) = acc;
        }
    return m;
}

// Vectors spanning the annihilator of alpha (alpha^T n = 0).
std::vector<CVec> alpha_perp(const CVec& alpha) {
    const auto l = alpha.size();
    std::vector<CVec> out;
    for (Eigen::Index q = 0; q + 1 < l; ++q) {
        CVec n = CVec::Zero(l);
        n(q) = 1.0;
        n(l - 1) = -alpha(q);
        out.push_back(n);
    }
    return out;
}

}  // namespace

MatrixFunc laurent_to_matrix(const CurvePtr& c, const LaurentMat& M) {
    const int l = static_cast<int>(M.c[0].rows());
    MatrixFunc m = MatrixFunc::zero(c, l);
    Poly den = M.lo < 0 ? Poly::monomial(-M.lo) : Poly::constant(1.0);
    int shift = std::max(0, M.lo);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
            std::vector<cplx> co(static_cast<size_t>(shift), cplx{});
            for (const auto& A : M.c) co.push_back(A(i, j));
            m(i, j) = FFElement::make(c, Poly(co), {}, den);
        }
    return m;
}


Place default_p0(const KricheverLax& L) {
    const CurvePtr& c = L.curve();
    for (cplx x0 : {cplx(0.917, 0.233), cplx(-0.71, 0.52), cplx(0.12, -0.93), cplx(-0.48, -0.41), cplx(1.41, 0.66)}) {
        bool ok = c->is_rational() || std::abs(c->f()(x0)) > 0.1;
        for (const auto& tp : L.tyurin.points) ok = ok && std::abs(tp.gamma.x - x0) > 0.3;
        for (const auto& [p, m] : L.K.terms()) ok = ok && (!p.is_finite() || std::abs(p.x - x0) > 0.3);
        if (ok) return c->places_over(x0)[0];
    }
    throw Error(Errc::NonGenericPoint, "no admissible normalization point");
}

MatrixFunc build_m(const KricheverLax& L, const AnsatzSpec& a) {
    const CurvePtr& c = L.curve();
    if (c->is_rational() && L.tyurin.points.empty()) return laurent_to_matrix(c, build_m_polynomial(poly_of(L), a));
    const int l = L.size();

    // Targets: principal parts of w^-m L^n at each ansatz place.
    struct Target {
        Place p;
        int ord;
        std::vector<CMat> T;  // exponents -ord..-1
    };
    std::vector<Target> targets;
    for (const auto& e : a.entries) {
        int kp = L.K.multiplicity(e.p);
        if (kp <= 0) throw Error(Errc::InvalidArgument, "ansatz place outside supp(K)");
        int ord = e.m + e.n * kp;
        if (ord <= 0) continue;
        int hiL = e.m - 1 + (e.n - 1) * kp;
        auto Ls = L.matrix.laurent(e.p, -kp, std::max(hiL, -kp));
        std::vector<CMat> P{CMat::Identity(l, l)};
        int loP = 0;
        for (int k = 0; k < e.n; ++k) {
            P = series_mul(P, loP, Ls, -kp, e.m - 1);
            loP -= kp;
        }
        std::vector<CMat> T;
        for (int k = -ord; k <= -1; ++k) {
            int src = k + e.m;  // coefficient of w^src in L^n
            T.push_back(src >= loP && src - loP < static_cast<int>(P.size()) ? P[static_cast<size_t>(src - loP)] : CMat::Zero(l, l));
        }
        bool merged = false;
        for (auto& t : targets)
            if (t.p.same(e.p)) {
                int o = std::max(t.ord, ord);
                std::vector<CMat> S(static_cast<size_t>(o), CMat::Zero(l, l));
                for (int k = 0; k < t.ord; ++k) S[static_cast<size_t>(o - t.ord + k)] += t.T[static_cast<size_t>(k)];
                for (int k = 0; k < ord; ++k) S[static_cast<size_t>(o - ord + k)] += T[static_cast<size_t>(k)];
                t.ord = o;
                t.T = std::move(S);
                merged = true;
            }
        if (!merged) targets.push_back({e.p, ord, std::move(T)});
    }

    Divisor D;
    for (const auto& tp : L.tyurin.points) D.add(tp.gamma, 1);
    for (const auto& t : targets) D.add(t.p, t.ord);
    auto B = rr_basis(c, D);
    const int N = static_cast<int>(B.size());
    // Scalar polar parts commute with L, so principal parts are matched modulo f(w) I.
    int nscalar = 0;
    for (const auto& t : targets) nscalar += t.ord;
    const int cols = l * l * N + nscalar;
    auto idx = [&](int i, int k, int n) { return (i * l + k) * N + n; };

    std::vector<Eigen::RowVectorXcd> rows;
    std::vector<cplx> rhs;
    int sc = l * l * N;
    for (const auto& t : targets) {
        std::vector<std::vector<cplx>> bs;
        for (const auto& b : B) bs.push_back(laurent_expand(b, t.p, -t.ord, -1));
        for (int q = 0; q < t.ord; ++q)
            for (int i = 0; i < l; ++i)
                for (int k = 0; k < l; ++k) {
                    Eigen::RowVectorXcd r = Eigen::RowVectorXcd::Zero(cols);
                    for (int n = 0; n < N; ++n) r(idx(i, k, n)) = bs[static_cast<size_t>(n)][static_cast<size_t>(q)];
                    if (i == k) r(sc + q) = -1.0;
                    rows.push_back(r);
                    rhs.push_back(t.T[static_cast<size_t>(q)](i, k));
                }
        sc += t.ord;
    }
    for (const auto& tp : L.tyurin.points) {
        std::vector<cplx> rn, cn;
        for (const auto& b : B) {
            auto co = laurent_expand(b, tp.gamma, -1, 0);
            rn.push_back(co[0]);
            cn.push_back(co[1]);
        }
        for (const CVec& nv : alpha_perp(tp.alpha)) {
            // Residue rows proportional to alpha: R n = 0.
            for (int i = 0; i < l; ++i) {
                Eigen::RowVectorXcd r = Eigen::RowVectorXcd::Zero(cols);
                for (int k = 0; k < l; ++k)
                    for (int n = 0; n < N; ++n) r(idx(i, k, n)) = rn[static_cast<size_t>(n)] * nv(k);
                rows.push_back(r);
                rhs.push_back(0.0);
            }
            // alpha a left eigenvector of M_{j,0}: (alpha^T M0) n = 0.
            Eigen::RowVectorXcd r = Eigen::RowVectorXcd::Zero(cols);
            for (int i = 0; i < l; ++i)
                for (int k = 0; k < l; ++k)
                    for (int n = 0; n < N; ++n) r(idx(i, k, n)) += tp.alpha(i) * cn[static_cast<size_t>(n)] * nv(k);
            rows.push_back(r);
            rhs.push_back(0.0);
        }
    }
    {
        Place p0 = a.p0 ? *a.p0 : default_p0(L);
        Eigen::RowVectorXcd r = Eigen::RowVectorXcd::Zero(cols);
        for (int i = 0; i < l; ++i)
            for (int n = 0; n < N; ++n) r(idx(i, i, n)) = B[static_cast<size_t>(n)].value_at(p0);
        rows.push_back(r);
        rhs.push_back(0.0);
    }
    CMat A(static_cast<Eigen::Index>(rows.size()), cols);
    CVec b(static_cast<Eigen::Index>(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        A.row(static_cast<Eigen::Index>(r)) = rows[r];
        b(static_cast<Eigen::Index>(r)) = rhs[r];
    }
    auto sol = lstsq(A, b);
    if (sol.rel_residual > 1e-8) {
        std::ostringstream os;
        os << "build_m: principal-part matching infeasible (relative defect " << sol.rel_residual << ")";
        throw Error(Errc::AnsatzInfeasible, os.str());
    }
    return assemble(c, l, B, sol.x.head(l * l * N));
}

TangencyReport tangency_check(const KricheverLax& L, const MatrixFunc& M, double tol) {
    TangencyReport rep;
    const CurvePtr& c = L.curve();
    std::vector<Place> places;
    auto push = [&](const Place& p) {
        for (const auto& q : places)
            if (q.same(p)) return;
        places.push_back(p);
    };
    for (const auto& tp : L.tyurin.points) push(tp.gamma);
    for (const MatrixFunc* m : {&L.matrix, &M})
        for (int i = 0; i < m->size(); ++i)
            for (int j = 0; j < m->size(); ++j)
                for (auto [r, mult] : (*m)(i, j).d().root_clusters())
                    for (const Place& p : c->places_over(r)) push(p);
    for (const Place& p : c->infinite_places()) push(p);
    rep.angles.assign(L.tyurin.points.size(), 0.0);

    for (const Place& p : places) {
        int jt = -1;
        for (size_t j = 0; j < L.tyurin.points.size(); ++j)
            if (L.tyurin.points[j].gamma.same(p)) jt = static_cast<int>(j);
        int bL = pole_bound(L.matrix, p), bM = pole_bound(M, p);
        if (bL + bM == 0) continue;
        auto Ls = L.matrix.laurent(p, -bL, bM + 1);
        auto Ms = M.laurent(p, -bM, bL + 1);
        auto ML = series_mul(Ms, -bM, Ls, -bL, -1);
        auto LM = series_mul(Ls, -bL, Ms, -bM, -1);
        double scale = 1.0;
        for (const auto& X : Ls) scale = std::max(scale, X.norm());
        double sm = 1.0;
        for (const auto& X : Ms) sm = std::max(sm, X.norm());
        scale *= sm;
        int allowed;
        std::string clause;
        if (jt >= 0) {
            allowed = 2;
            clause = "pole_order_gamma";
        } else if (L.K.multiplicity(p) > 0) {
            // Tangent to the space of Lax matrices: no worse than L itself.
            allowed = L.K.multiplicity(p);
            clause = "pole_order_support";
        } else {
            allowed = 0;
            clause = "stray_pole";
        }
        double defect = 0.0;
        const int lo = -bL - bM;
        for (int k = lo; k < -allowed; ++k) defect = std::max(defect, (ML[static_cast<size_t>(k - lo)] - LM[static_cast<size_t>(k - lo)]).norm());
        if (defect > tol * scale) rep.failures.push_back({clause, p, jt, defect / scale});
        if (jt >= 0 && -2 >= lo) {
            CMat C = ML[static_cast<size_t>(-2 - lo)] - LM[static_cast<size_t>(-2 - lo)];
            const CMat& R = L.L_m1[static_cast<size_t>(jt)];
            double angle = 0.0;
            if (C.norm() > tol * scale) {
                cplx proj = R.norm() > 0 ? (R.conjugate().cwiseProduct(C)).sum() / R.squaredNorm() : cplx{};
                angle = (C - proj * R).norm() / C.norm();
            }
            rep.angles[static_cast<size_t>(jt)] = angle;
            if (angle > tol) rep.failures.push_back({"double_pole_direction", p, jt, angle});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Moving-pole integration

namespace {

struct Extracted {
    std::vector<CMat> R, L0;
    std::vector<CVec> alpha;
};

CVec alpha_of(const CMat& R) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < R.rows(); ++i)
        if (R.row(i).norm() > R.row(best).norm()) best = i;
    CVec a = R.row(best).transpose();
    cplx last = a(a.size() - 1);
    if (std::abs(last) < 1e-12 * std::max(a.norm(), 1e-300)) throw Error(Errc::NonGenericPoint, "residue row direction has vanishing last coordinate");
    return a / last;
}

double defect_of(const CMat& R, const CMat& L0, const CVec& alpha) {
    const auto l = R.rows();
    double rn = std::max(R.norm(), 1e-300);
    Eigen::JacobiSVD<CMat> svd(R);
    auto sv = svd.singularValues();
    double d = l > 1 ? sv(1) / rn : 0.0;
    d = std::max(d, std::abs(R.trace()) / rn);
    Eigen::RowVectorXcd aL = alpha.transpose() * L0;
    d = std::max(d, (aL - aL(l - 1) * alpha.transpose()).norm() / std::max(1.0, L0.norm()));
    return d;
}

KricheverLax make_state(const MatrixFunc& m, const std::vector<Place>& gamma, const Divisor& K) {
    KricheverLax L;
    L.matrix = m;
    L.K = K;
    const int l = m.size();
    for (const auto& g : gamma) {
        auto co = m.laurent(g, -1, 0);
        CVec a = alpha_of(co[0]);
        L.tyurin.points.push_back({g, a});
        L.L_m1.push_back(co[0]);
        L.L_0.push_back(co[1]);
        L.beta.push_back(co[0].col(l - 1));
        Eigen::RowVectorXcd aL = a.transpose() * co[1];
        L.kappa.push_back(aL(l - 1));
    }
    return L;
}

struct Stage {
    std::vector<cplx> gdot;
    std::vector<CMat> Lv, Vv;  // values at samples
};

class MovingPole {
public:
    MovingPole(const KricheverLax& L0, const AnsatzSpec& a, MovingPoleOptions opt) : a_(a), opt_(opt), K_(L0.K), c_(L0.curve()) {
        if (!a_.p0) a_.p0 = default_p0(L0);
        for (double rad : {0.55, 1.25})
            for (int k = 0; k < 12; ++k) {
                cplx x0 = std::polar(rad, 2.0 * M_PI * (k + 0.37) / 12.0);
                if (std::abs(c_->f()(x0)) < 0.05) continue;
                for (const Place& p : c_->places_over(x0)) samples_.push_back(p);
            }
    }

    Stage eval(const KricheverLax& L) const {
        Stage s;
        MatrixFunc M = build_m(L, a_);
        for (size_t j = 0; j < L.tyurin.points.size(); ++j) {
            const Place& g = L.tyurin.points[j].gamma;
            auto Ls = L.matrix.laurent(g, -1, -1);
            auto Ms = M.laurent(g, -1, -1);
            CMat C = Ms[0] * Ls[0] - Ls[0] * Ms[0];
            const CMat& R = Ls[0];
            if (R.norm() < 1e-10) throw Error(Errc::NonGenericPoint, "residue at a Tyurin point vanished");
            s.gdot.push_back((R.conjugate().cwiseProduct(C)).sum() / R.squaredNorm());
        }
        for (const Place& p : active_) {
            CMat Lp = L.matrix.value_at(p), Mp = M.value_at(p);
            s.Lv.push_back(Lp);
            s.Vv.push_back(Mp * Lp - Lp * Mp);
        }
        return s;
    }

    void select_samples(const std::vector<Place>& g0, const std::vector<Place>& g1) {
        active_.clear();
        for (const Place& p : samples_) {
            bool ok = true;
            for (const auto* gs : {&g0, &g1})
                for (const Place& g : *gs) ok = ok && std::abs(g.x - p.x) > 0.15;
            if (ok) active_.push_back(p);
        }
    }

    std::vector<Place> advance(const std::vector<Place>& g, const std::vector<cplx>& gdot, double h) const {
        std::vector<Place> out;
        for (size_t j = 0; j < g.size(); ++j) {
            cplx x = g[j].x + h * gdot[j];
            cplx fx = c_->f()(x);
            if (std::abs(fx) < 1e-6) throw Error(Errc::StepRejected, "Tyurin point collided with a branch point");
            for (const auto& [p, m] : K_.terms())
                if (p.is_finite() && std::abs(p.x - x) < 1e-6) throw Error(Errc::StepRejected, "Tyurin point collided with supp(K)");
            cplx y = std::sqrt(fx);
            if (std::abs(y - g[j].y) > std::abs(y + g[j].y)) y = -y;
            out.push_back(Place::regular(x, y));
        }
        return out;
    }

    // Least-squares fit of sampled values in L(gamma + K); optional reprojection.
    KricheverLax fit(const std::vector<CMat>& vals, const std::vector<Place>& gamma, bool project, double* pre, double* post,
                     double* fit_res) const {
        Divisor D = K_;
        for (const auto& g : gamma) D.add(g, 1);
        auto B = rr_basis(c_, D);
        const int N = static_cast<int>(B.size());
        const int l = static_cast<int>(vals[0].rows());
        const Eigen::Index S = static_cast<Eigen::Index>(active_.size());
        CMat A(S, N);
        for (Eigen::Index s = 0; s < S; ++s)
            for (int n = 0; n < N; ++n) A(s, n) = B[static_cast<size_t>(n)].value_at(active_[static_cast<size_t>(s)]);
        Eigen::CompleteOrthogonalDecomposition<CMat> cod(A);
        CVec x(l * l * N);
        double res = 0.0, nrm = 0.0;
        for (int i = 0; i < l; ++i)
            for (int k = 0; k < l; ++k) {
                CVec b(S);
                for (Eigen::Index s = 0; s < S; ++s) b(s) = vals[static_cast<size_t>(s)](i, k);
                CVec xe = cod.solve(b);
                res += (A * xe - b).squaredNorm();
                nrm += b.squaredNorm();
                x.segment((i * l + k) * N, N) = xe;
            }
        if (fit_res) *fit_res = std::sqrt(res / std::max(nrm, 1e-300));

        std::vector<std::vector<cplx>> rn(gamma.size()), cn(gamma.size());
        for (size_t j = 0; j < gamma.size(); ++j)
            for (const auto& b : B) {
                auto co = laurent_expand(b, gamma[j], -1, 0);
                rn[j].push_back(co[0]);
                cn[j].push_back(co[1]);
            }
        auto residues = [&](const CVec& xv, size_t j, CMat& R, CMat& L0) {
            R = CMat::Zero(l, l);
            L0 = CMat::Zero(l, l);
            for (int i = 0; i < l; ++i)
                for (int k = 0; k < l; ++k)
                    for (int n = 0; n < N; ++n) {
                        R(i, k) += xv((i * l + k) * N + n) * rn[j][static_cast<size_t>(n)];
                        L0(i, k) += xv((i * l + k) * N + n) * cn[j][static_cast<size_t>(n)];
                    }
        };
        auto defect = [&](const CVec& xv) {
            double d = 0.0;
            for (size_t j = 0; j < gamma.size(); ++j) {
                CMat R, L0;
                residues(xv, j, R, L0);
                d = std::max(d, defect_of(R, L0, alpha_of(R)));
            }
            return d;
        };
        if (pre) *pre = defect(x);
        if (project) {
            for (int sweep = 0; sweep < opt_.reprojection_sweeps; ++sweep) {
                std::vector<Eigen::RowVectorXcd> G;
                for (size_t j = 0; j < gamma.size(); ++j) {
                    CMat R, L0;
                    residues(x, j, R, L0);
                    CVec al = alpha_of(R);
                    for (const CVec& nv : alpha_perp(al)) {
                        for (int i = 0; i < l; ++i) {
                            Eigen::RowVectorXcd r = Eigen::RowVectorXcd::Zero(x.size());
                            for (int k = 0; k < l; ++k)
                                for (int n = 0; n < N; ++n) r((i * l + k) * N + n) = rn[j][static_cast<size_t>(n)] * nv(k);
                            G.push_back(r);
                        }
                        Eigen::RowVectorXcd r = Eigen::RowVectorXcd::Zero(x.size());
                        for (int i = 0; i < l; ++i)
                            for (int k = 0; k < l; ++k)
                                for (int n = 0; n < N; ++n) r((i * l + k) * N + n) += al(i) * cn[j][static_cast<size_t>(n)] * nv(k);
                        G.push_back(r);
                    }
                    Eigen::RowVectorXcd r = Eigen::RowVectorXcd::Zero(x.size());
                    for (int i = 0; i < l; ++i)
                        for (int n = 0; n < N; ++n) r((i * l + i) * N + n) = rn[j][static_cast<size_t>(n)];
                    G.push_back(r);
                }
                CMat Gm(static_cast<Eigen::Index>(G.size()), x.size());
                for (size_t r = 0; r < G.size(); ++r) Gm.row(static_cast<Eigen::Index>(r)) = G[r];
                Eigen::CompleteOrthogonalDecomposition<CMat> gcod(Gm);
                x -= gcod.solve(Gm * x);
            }
        }
        if (post) *post = defect(x);
        MatrixFunc m = MatrixFunc::zero(c_, l);
        for (int i = 0; i < l; ++i)
            for (int k = 0; k < l; ++k) {
                FFElement acc = FFElement::zero(c_);
                for (int n = 0; n < N; ++n) {
                    cplx v = x((i * l + k) * N + n);
                    if (std::abs(v) < 1e-15) continue;
                    acc = acc + B[static_cast<size_t>(n)] * v;
                }
                m(i, k) = acc;
            }
        return make_state(m, gamma, K_);
    }

    const std::vector<Place>& active() const { return active_; }

private:
    AnsatzSpec a_;
    MovingPoleOptions opt_;
    Divisor K_;
    CurvePtr c_;
    std::vector<Place> samples_, active_;
};

std::vector<Place> gammas(const KricheverLax& L) {
    std::vector<Place> g;
    for (const auto& tp : L.tyurin.points) g.push_back(tp.gamma);
    return g;
}

}  // namespace

double tyurin_defect(const KricheverLax& L) {
    double d = 0.0;
    for (size_t j = 0; j < L.tyurin.points.size(); ++j) {
        auto co = L.matrix.laurent(L.tyurin.points[j].gamma, -1, 0);
        d = std::max(d, defect_of(co[0], co[1], alpha_of(co[0])));
    }
    return d;
}

Trajectory integrate_moving_pole(const KricheverLax& L0, const AnsatzSpec& a, double tEnd, double dt, int stride,
                                 MovingPoleOptions opt) {
    if (L0.curve()->is_rational()) throw Error(Errc::UnsupportedRegime, "moving-pole integration needs a hyperelliptic base");
    if (dt <= 0.0 || tEnd < 0.0) throw Error(Errc::InvalidArgument, "integrate: need dt > 0 and tEnd >= 0");
    MovingPole mp(L0, a, opt);
    Trajectory tr;
    KricheverLax cur = L0;
    tr.samples.push_back({0.0, cur, FlowRegime::MovingPole});
    const long nsteps = std::lround(tEnd / dt);
    for (long s = 0; s < nsteps; ++s) {
        auto g0 = gammas(cur);
        mp.select_samples(g0, g0);
        Stage k1 = mp.eval(cur);
        auto gh = mp.advance(g0, k1.gdot, dt / 2);
        std::vector<CMat> vh;
        for (size_t q = 0; q < k1.Lv.size(); ++q) vh.push_back(k1.Lv[q] + (dt / 2) * k1.Vv[q]);
        KricheverLax half = mp.fit(vh, gh, opt.reproject, nullptr, nullptr, nullptr);
        Stage k2 = mp.eval(half);
        auto g1 = mp.advance(g0, k2.gdot, dt);
        std::vector<CMat> v1;
        for (size_t q = 0; q < k1.Lv.size(); ++q) v1.push_back(k1.Lv[q] + dt * k2.Vv[q]);
        StepDiag d;
        d.t = static_cast<double>(s + 1) * dt;
        d.dt = dt;
        KricheverLax next = mp.fit(v1, g1, opt.reproject, &d.constraint_defect, &d.post_defect, &d.fit_residual);
        if (opt.reproject && d.post_defect > 10.0 * opt.defect_budget) {
            ++tr.rejections;
            std::ostringstream os;
            os << "moving-pole step at t = " << d.t << " left constraint defect " << d.post_defect;
            throw Error(Errc::StepRejected, os.str());
        }
        tr.cumulative_defect += d.constraint_defect;
        tr.steps.push_back(d);
        cur = std::move(next);
        if ((s + 1) % stride == 0 || s + 1 == nsteps) tr.samples.push_back({d.t, cur, FlowRegime::MovingPole});
    }
    return tr;
}

Trajectory integrate_flow(const KricheverLax& L0, const AnsatzSpec& a, double tEnd, double dt, Scheme scheme, int stride) {
    if (scheme == Scheme::RK4) {
        if (!L0.curve()->is_rational()) throw Error(Errc::UnsupportedRegime, "RK4 fixed-pole scheme needs the rational line");
        AnsatzSpec spec = a;
        return integrate_fixed_pole(L0, [spec](const PolyMat& P, double) { return build_m_polynomial(P, spec); }, tEnd, dt, stride);
    }
    return integrate_moving_pole(L0, a, tEnd, dt, stride);
}

}  // namespace laxflow
