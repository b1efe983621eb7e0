"""Dense primal-dual interior-point SDP solver.

Solves min <C,X> + c.w  s.t.  linear rows on (X, w),  X psd,  w >= 0
through a homogeneous self-dual embedding with Nesterov-Todd scaling and a
Mehrotra predictor-corrector, which yields infeasibility/unboundedness
certificates as a by-product.  Also hosts the 1-D concave search for the
(alpha, beta) pair certificate and the small auxiliary SDP formulations used
by the certification and reduction stages.

Instance sizes here are tiny (n <= ~10, <= ~60 rows); robustness beats speed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import GeoCop
from .symmat import SymMat, combine, lambda_min

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200
_INF_CERT_TOL = 1e-6
_STEP_FRACTION = 0.99


@dataclass(frozen=True)
class SdpProblem:
    n: int
    objective: SymMat
    eq_constraints: tuple = ()    # of (SymMat, rhs)
    ineq_constraints: tuple = ()  # of (SymMat, sense in {">=", "<=", "=="}, rhs)

    def __post_init__(self):
        if self.objective.n != self.n:
            raise ValueError("objective dimension mismatch")
        for m, rhs in self.eq_constraints:
            if m.n != self.n or not math.isfinite(rhs):
                raise ValueError("bad equality constraint")
        for m, sense, rhs in self.ineq_constraints:
            if m.n != self.n or sense not in (">=", "<=", "==") or not math.isfinite(rhs):
                raise ValueError("bad inequality constraint")


@dataclass
class SdpSolution:
    status: str                      # optimal | infeasible | unbounded | max_iter | numerical
    X: Optional[SymMat]
    dual_eq: np.ndarray
    dual_ineq: np.ndarray
    value: float
    residuals: tuple                 # (primal, dual, gap)
    dual_value: float = math.nan
    iterations: int = 0
    certificate: Optional[dict] = None
    mu_history: tuple = ()


# --------------------------------------------------------------------------
# homogeneous self-dual conic core
# --------------------------------------------------------------------------

@dataclass
class _ConicData:
    """min <Cm,X> + cw.w over rows <Am_i,X> + aw_i.w = b_i, X psd(n), w >= 0."""

    n: int
    p: int
    Cm: np.ndarray          # (n, n) dense symmetric
    cw: np.ndarray          # (p,)
    Am: np.ndarray          # (m, n, n)
    Aw: np.ndarray          # (m, p)
    b: np.ndarray           # (m,)


def _sym(a):
    return (a + a.T) / 2.0


class _Point:
    __slots__ = ("X", "w", "y", "S", "z", "tau", "kappa")

    def __init__(self, n, p, m):
        self.X = np.eye(n)
        self.w = np.ones(p)
        self.y = np.zeros(m)
        self.S = np.eye(n)
        self.z = np.ones(p)
        self.tau = 1.0
        self.kappa = 1.0


def _apply_A(d: _ConicData, X, w):
    out = np.einsum("iab,ab->i", d.Am, X) if d.n else np.zeros(len(d.b))
    if d.p:
        out = out + d.Aw @ w
    return out


def _apply_At(d: _ConicData, y):
    mat = np.einsum("i,iab->ab", y, d.Am) if d.n else np.zeros((0, 0))
    vec = d.Aw.T @ y if d.p else np.zeros(0)
    return mat, vec


def _pair_norm(mat, vec):
    return math.sqrt(float((mat * mat).sum()) + float(vec @ vec))


def _chol_or_sqrt(X):
    try:
        return np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        d, V = np.linalg.eigh(_sym(X))
        floor = max(float(d.max()), 1.0) * 1e-14
        return V @ np.diag(np.sqrt(np.maximum(d, floor)))


def _nt_scaling(X, S):
    """Factor G with G^-1 X G^-T = G^T S G = diag(sigma)."""
    L1 = _chol_or_sqrt(X)
    Msym = _sym(L1.T @ S @ L1)
    d, V = np.linalg.eigh(Msym)
    d = np.maximum(d, 1e-300)
    G = L1 @ V @ np.diag(d ** -0.25)
    Ginv = np.diag(d ** 0.25) @ V.T @ np.linalg.inv(L1)
    sigma = np.sqrt(d)
    return G, Ginv, sigma


def _step_to_boundary_psd(sigma, dmat):
    scale = 1.0 / np.sqrt(sigma)
    E = _sym(dmat * scale[:, None] * scale[None, :])
    lmin = float(np.linalg.eigvalsh(E)[0])
    return math.inf if lmin >= 0.0 else 1.0 / (-lmin)


def _step_to_boundary_vec(v, dv):
    neg = dv < 0.0
    if not neg.any():
        return math.inf
    return float(np.min(-v[neg] / dv[neg]))


def _conic_solve(d: _ConicData, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """Returns dict with status, X, w, y, Smat, z, value, dual_value, residuals."""
    n, p, m = d.n, d.p, len(d.b)
    nu = n + p

    # row/objective scaling for conditioning; undone on exit
    rho = np.array([max(_pair_norm(d.Am[i] if n else np.zeros((0, 0)),
                                   d.Aw[i] if p else np.zeros(0)), 1e-12)
                    for i in range(m)])
    Am = d.Am / rho[:, None, None] if n else d.Am
    Aw = d.Aw / rho[:, None] if p else d.Aw
    b = d.b / rho
    rho_c = max(1.0, _pair_norm(d.Cm, d.cw))
    Cm = d.Cm / rho_c
    cw = d.cw / rho_c
    ds = _ConicData(n=n, p=p, Cm=Cm, cw=cw, Am=Am, Aw=Aw, b=b)

    pt = _Point(n, p, m)
    norm_b = float(np.linalg.norm(b))
    norm_c = _pair_norm(Cm, cw)
    mu0 = (n + p + 1.0) / (nu + 1.0)
    mu_hist = []
    best = None
    best_metric = math.inf
    best_snap = None
    since_best = 0
    status = "max_iter"
    it = 0

    def snapshot():
        return (pt.X.copy(), pt.w.copy(), pt.y.copy(), pt.S.copy(), pt.z.copy(),
                pt.tau, pt.kappa)

    def restore(snap):
        pt.X, pt.w, pt.y, pt.S, pt.z, pt.tau, pt.kappa = (
            snap[0].copy(), snap[1].copy(), snap[2].copy(), snap[3].copy(),
            snap[4].copy(), snap[5], snap[6])

    def current_metrics():
        xhat_m = pt.X / pt.tau
        xhat_w = pt.w / pt.tau
        yhat = pt.y / pt.tau
        sm = pt.S / pt.tau
        sw = pt.z / pt.tau
        pres_v = _apply_A(ds, xhat_m, xhat_w) - b
        atm, atw = _apply_At(ds, yhat)
        dres = _pair_norm(atm + sm - Cm, (atw + sw - cw) if p else np.zeros(0))
        pobj = float((Cm * xhat_m).sum()) + float(cw @ xhat_w)
        dobj = float(b @ yhat)
        pres = float(np.linalg.norm(pres_v)) / (1.0 + norm_b)
        dresr = dres / (1.0 + norm_c)
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        return pres, dresr, gap, pobj, dobj

    for it in range(1, max_iter + 1):
        comp = float((pt.X * pt.S).sum()) + float(pt.w @ pt.z) + pt.tau * pt.kappa
        mu = comp / (nu + 1.0)
        mu_hist.append(mu)

        pres, dresr, gap, pobj, dobj = current_metrics()
        best = (pres, dresr, gap, pobj, dobj)
        metric = max(pres, dresr, gap)
        if metric < best_metric:
            best_metric = metric
            best_snap = snapshot()
            since_best = 0
        else:
            since_best += 1
        if pres <= tol and dresr <= tol and gap <= tol:
            status = "optimal"
            break

        # Farkas-type certificate checks (homogeneous embedding by-product);
        # these must run before stall detection: on infeasible or unbounded
        # instances the optimality metrics never improve
        by = float(b @ pt.y)
        if by > 1e-10:
            atm, atw = _apply_At(ds, pt.y)
            res = _pair_norm(atm + pt.S, (atw + pt.z) if p else np.zeros(0))
            if res <= _INF_CERT_TOL * by:
                status = "infeasible"
                break
        cx = float((Cm * pt.X).sum()) + float(cw @ pt.w)
        if cx < -1e-10:
            res = float(np.linalg.norm(_apply_A(ds, pt.X, pt.w)))
            if res <= _INF_CERT_TOL * (-cx):
                status = "unbounded"
                break

        if comp <= 0.0 or mu <= 1e-17 * max(mu0, 1.0) or since_best >= 12:
            # past the attainable accuracy for this instance; best iterate wins
            status = "numerical"
            break

        # residual vectors of the embedding
        Rp = _apply_A(ds, pt.X, pt.w) - b * pt.tau
        Rd_m, Rd_w = _apply_At(ds, pt.y)
        Rd_m = Rd_m + pt.S - Cm * pt.tau
        Rd_w = (Rd_w + pt.z - cw * pt.tau) if p else np.zeros(0)
        Rg = float((Cm * pt.X).sum()) + float(cw @ pt.w) - float(b @ pt.y) + pt.kappa

        try:
            G, Ginv, sigma = _nt_scaling(pt.X, pt.S)
        except np.linalg.LinAlgError:
            status = "numerical"
            break
        W = G @ G.T
        D = pt.w / pt.z if p else np.zeros(0)

        # Schur complement, shared by predictor and corrector
        if n:
            WAW = np.einsum("ab,ibc,cd->iad", W, Am, W)
            M = np.einsum("iab,jab->ij", WAW, Am)
        else:
            WAW = Am
            M = np.zeros((m, m))
        if p:
            M = M + (Aw * D[None, :]) @ Aw.T
        try:
            evals, evecs = np.linalg.eigh(_sym(M)) if m else (np.zeros(0), np.zeros((0, 0)))
        except np.linalg.LinAlgError:
            status = "numerical"
            break
        cut = (float(evals.max()) if m else 0.0) * 1e-14 + 1e-300
        inv_e = np.where(evals > cut, 1.0 / np.maximum(evals, cut), 0.0)

        def msolve(r):
            if not m:
                return r
            sol = evecs @ (inv_e * (evecs.T @ r))
            sol = sol + evecs @ (inv_e * (evecs.T @ (r - M @ sol)))
            return sol

        WCW = W @ Cm @ W if n else Cm
        k_c = (np.einsum("iab,ab->i", Am, WCW) if n else np.zeros(m))
        if p:
            k_c = k_c + Aw @ (D * cw)
        q_cc = float((Cm * WCW).sum()) + (float(cw @ (D * cw)) if p else 0.0)
        WRdW = W @ Rd_m @ W if n else Rd_m
        g2 = (np.einsum("iab,ab->i", Am, WRdW) if n else np.zeros(m))
        if p:
            g2 = g2 + Aw @ (D * Rd_w)
        q2 = float((Cm * WRdW).sum()) + (float(cw @ (D * Rd_w)) if p else 0.0)
        u2 = msolve(k_c + b)

        def direction(sig_c, corr):
            """corr = None (predictor) or scaled affine products (corrector)."""
            one_ms = 1.0 - sig_c
            if n:
                Rc = -np.diag(sigma * sigma)
                if corr is not None:
                    Rc = Rc - corr[0]
                if sig_c:
                    Rc = Rc + sig_c * mu * np.eye(n)
                Psi = 2.0 * Rc / (sigma[:, None] + sigma[None, :])
                GPsiG = G @ Psi @ G.T
            else:
                GPsiG = np.zeros((0, 0))
            if p:
                rc_w = sig_c * mu - pt.w * pt.z
                if corr is not None:
                    rc_w = rc_w - corr[1]
                gw = rc_w / pt.z
            else:
                rc_w = np.zeros(0)
                gw = np.zeros(0)
            rc_tau = sig_c * mu - pt.tau * pt.kappa
            if corr is not None:
                rc_tau = rc_tau - corr[2]

            g1 = (np.einsum("iab,ab->i", Am, GPsiG) if n else np.zeros(m))
            if p:
                g1 = g1 + Aw @ gw
            q1 = float((Cm * GPsiG).sum()) + (float(cw @ gw) if p else 0.0)
            u1 = msolve(-g1 - one_ms * g2 - one_ms * Rp)

            denom = float((k_c - b) @ u2) - q_cc - pt.kappa / pt.tau
            numer = (-one_ms * Rg - q1 - one_ms * q2 - rc_tau / pt.tau
                     - float((k_c - b) @ u1))
            dtau = numer / denom
            dy = u1 + dtau * u2
            atm, atw = _apply_At(ds, dy)
            if n:
                dS = _sym(-one_ms * Rd_m + Cm * dtau - atm)
                dX = _sym(GPsiG - W @ dS @ W)
            else:
                dS = np.zeros((0, 0))
                dX = np.zeros((0, 0))
            dz = (-one_ms * Rd_w + cw * dtau - atw) if p else np.zeros(0)
            dw = (gw - D * dz) if p else np.zeros(0)
            dkappa = (rc_tau - pt.kappa * dtau) / pt.tau
            return dX, dw, dy, dS, dz, dtau, dkappa

        # predictor
        aff = direction(0.0, None)
        dXa, dwa, _, dSa, dza, dta, dka = aff
        alpha_aff = min(
            _step_to_boundary_psd(sigma, Ginv @ dXa @ Ginv.T) if n else math.inf,
            _step_to_boundary_psd(sigma, G.T @ dSa @ G) if n else math.inf,
            _step_to_boundary_vec(pt.w, dwa) if p else math.inf,
            _step_to_boundary_vec(pt.z, dza) if p else math.inf,
            -pt.tau / dta if dta < 0 else math.inf,
            -pt.kappa / dka if dka < 0 else math.inf,
            1.0,
        )
        comp_aff = (float(((pt.X + alpha_aff * dXa) * (pt.S + alpha_aff * dSa)).sum()) if n else 0.0)
        if p:
            comp_aff += float((pt.w + alpha_aff * dwa) @ (pt.z + alpha_aff * dza))
        comp_aff += (pt.tau + alpha_aff * dta) * (pt.kappa + alpha_aff * dka)
        sig_c = min(max((max(comp_aff, 0.0) / comp) ** 3, 1e-12), 0.999)

        # corrector
        if n:
            dxs = Ginv @ dXa @ Ginv.T
            dss = G.T @ dSa @ G
            corr_m = _sym(dxs @ dss)
        else:
            corr_m = None
        corr = (corr_m if n else np.zeros((0, 0)),
                dwa * dza if p else np.zeros(0),
                dta * dka)
        dX, dw, dy, dS, dz, dtau, dkappa = direction(sig_c, corr)

        alpha = min(
            _step_to_boundary_psd(sigma, Ginv @ dX @ Ginv.T) if n else math.inf,
            _step_to_boundary_psd(sigma, G.T @ dS @ G) if n else math.inf,
            _step_to_boundary_vec(pt.w, dw) if p else math.inf,
            _step_to_boundary_vec(pt.z, dz) if p else math.inf,
            -pt.tau / dtau if dtau < 0 else math.inf,
            -pt.kappa / dkappa if dkappa < 0 else math.inf,
        )
        alpha = min(_STEP_FRACTION * alpha, 1.0)
        if not math.isfinite(alpha) or alpha <= 1e-10:
            status = "numerical"
            break

        if n:
            pt.X = _sym(pt.X + alpha * dX)
            pt.S = _sym(pt.S + alpha * dS)
        if p:
            pt.w = pt.w + alpha * dw
            pt.z = pt.z + alpha * dz
        pt.y = pt.y + alpha * dy
        pt.tau += alpha * dtau
        pt.kappa += alpha * dkappa
        if not (pt.tau > 0 and pt.kappa > 0):
            status = "numerical"
            break

    if status in ("max_iter", "numerical") and best_snap is not None:
        restore(best_snap)
        pres, dresr, gap, pobj, dobj = current_metrics()
        if max(pres, dresr, gap) <= tol:
            status = "optimal"
        best = (pres, dresr, gap, pobj, dobj)
    pres, dresr, gap, pobj, dobj = best if best is not None else current_metrics()

    # undo scaling
    def unscale_duals(yvec):
        return yvec * rho_c / rho

    out = {
        "status": status,
        "iterations": it,
        "mu_history": tuple(mu_hist),
        "residuals": (pres, dresr, gap),
        "X": pt.X / pt.tau if n else np.zeros((0, 0)),
        "w": pt.w / pt.tau if p else np.zeros(0),
        "y": unscale_duals(pt.y / pt.tau),
        "value": pobj * rho_c,
        "dual_value": dobj * rho_c,
        "certificate": None,
    }
    if status == "infeasible":
        out["certificate"] = {"kind": "primal_infeasible", "y": unscale_duals(pt.y)}
        out["X"] = None
    elif status == "unbounded":
        ray = pt.X.copy() if n else np.zeros((0, 0))
        out["certificate"] = {"kind": "dual_infeasible", "X": ray, "w": pt.w.copy()}
        out["X"] = None
    return out


# --------------------------------------------------------------------------
# public SdpProblem interface
# --------------------------------------------------------------------------

def _assemble(p: SdpProblem):
    n = p.n
    rows_m, rows_w, rhs = [], [], []
    ineq_rows = []  # positions of rows that carry a slack
    eqs = list(p.eq_constraints)
    ineqs = []
    for mat, sense, r in p.ineq_constraints:
        if sense == "==":
            eqs.append((mat, r))
        elif sense == ">=":
            ineqs.append((mat, r))
        else:
            ineqs.append((mat.scale(-1.0), -r))
    n_slack = len(ineqs)
    for mat, r in eqs:
        rows_m.append(mat.to_dense())
        rows_w.append(np.zeros(n_slack))
        rhs.append(r)
    for j, (mat, r) in enumerate(ineqs):
        rows_m.append(mat.to_dense())
        wrow = np.zeros(n_slack)
        wrow[j] = -1.0
        rows_w.append(wrow)
        rhs.append(r)
    d = _ConicData(
        n=n,
        p=n_slack,
        Cm=p.objective.to_dense(),
        cw=np.zeros(n_slack),
        Am=np.array(rows_m).reshape(len(rhs), n, n),
        Aw=np.array(rows_w).reshape(len(rhs), n_slack),
        b=np.array(rhs, dtype=float),
    )
    return d, len(eqs), n_slack


def solve(p: SdpProblem, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SdpSolution:
    """Solve the SDP; optimal solutions come with primal/dual residuals, and
    infeasibility / unboundedness are reported through Farkas-type certificates."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if not p.objective.is_finite():
        raise ValueError("non-finite objective")
    d, n_eq, n_slack = _assemble(p)
    res = _conic_solve(d, tol=tol, max_iter=max_iter)
    y = res["y"]
    # duals of ">="-form rows are the nonnegative slack multipliers; "<=" rows
    # were negated on entry, so their reported multiplier stays nonnegative too
    X = SymMat.from_dense(_sym(res["X"])) if res["X"] is not None else None
    return SdpSolution(
        status=res["status"],
        X=X,
        dual_eq=np.asarray(y[:n_eq]),
        dual_ineq=np.asarray(y[n_eq:]),
        value=res["value"],
        dual_value=res["dual_value"],
        residuals=res["residuals"],
        iterations=res["iterations"],
        certificate=res["certificate"],
        mu_history=res["mu_history"],
    )


# --------------------------------------------------------------------------
# auxiliary SDP formulations used by certify / reduce
# --------------------------------------------------------------------------

def relaxation_problem(p: GeoCop) -> SdpProblem:
    """min <Q,X> s.t. <H,X> = 1, <B,X> >= 0 for all members, X psd."""
    return SdpProblem(
        n=p.n,
        objective=p.Q,
        eq_constraints=((p.H, 1.0),),
        ineq_constraints=tuple((m, ">=", 0.0) for m in p.bset.members),
    )


def eq10_problem(a: SymMat, b: SymMat) -> SdpProblem:
    """Normalized refutation SDP: min <A,X> s.t. <B,X> <= 0, trace X = 1."""
    return SdpProblem(
        n=a.n,
        objective=a,
        eq_constraints=((SymMat.identity(a.n), 1.0),),
        ineq_constraints=((b, "<=", 0.0),),
    )


def inclusion_problem(a: SymMat, b: SymMat) -> SdpProblem:
    """min <A,X> s.t. <B,X> >= 0, trace X = 1; value >= 0 iff J+(B) included in J+(A)."""
    return SdpProblem(
        n=a.n,
        objective=a,
        eq_constraints=((SymMat.identity(a.n), 1.0),),
        ineq_constraints=((b, ">=", 0.0),),
    )


def corner_problem(b: SymMat) -> SdpProblem:
    """min <B,X> s.t. X_nn = 1, X psd; decides whether q(., 1, B) dips below 0."""
    n = b.n
    e = SymMat.from_dense(np.outer(*(np.eye(n)[-1],) * 2))
    return SdpProblem(n=n, objective=b, eq_constraints=((e, 1.0),))


def slater_data(members, n: int) -> _ConicData:
    """max t s.t. X >= t I, <B,X> >= 0, trace X = 1  via  Z = X - t I psd.

    Variables: Z (psd block), w = (t, slacks).  Objective: min -t.
    """
    mats = [m.to_dense() for m in members]
    k = len(mats)
    p = 1 + k
    rows_m = [np.eye(n)] + mats
    rows_w = []
    rhs = [1.0] + [0.0] * k
    wrow = np.zeros(p)
    wrow[0] = float(n)
    rows_w.append(wrow)  # trace Z + n t = 1
    for j, m in enumerate(mats):
        wr = np.zeros(p)
        wr[0] = float(np.trace(m))
        wr[1 + j] = -1.0
        rows_w.append(wr)  # <B,Z> + t tr(B) - s_j = 0
    cw = np.zeros(p)
    cw[0] = -1.0
    return _ConicData(
        n=n,
        p=p,
        Cm=np.zeros((n, n)),
        cw=cw,
        Am=np.array(rows_m),
        Aw=np.array(rows_w),
        b=np.array(rhs),
    )


def solve_slater(members, n: int, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """Returns (status, X_star, t_star): max-rank feasible point and its margin."""
    res = _conic_solve(slater_data(members, n), tol=tol, max_iter=max_iter)
    if res["status"] not in ("optimal", "max_iter"):
        return res["status"], None, -math.inf
    t = float(res["w"][0])
    X = _sym(res["X"] + t * np.eye(n))
    return res["status"], SymMat.from_dense(X), t


# --------------------------------------------------------------------------
# pairwise (alpha, beta) certificate
# --------------------------------------------------------------------------

_GOLDEN_ITERS = 120
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def solve_ab_certificate(a: SymMat, b: SymMat, tol: float = DEFAULT_TOL):
    """Search for alpha, beta > 0 with alpha*A + beta*B psd.

    lambda_min(A + tau B)/(1 + tau) equals lambda_min(mu A + (1-mu) B) at
    mu = 1/(1+tau), which is concave in mu (a min of linear functionals), so
    a golden-section search over mu in (0,1) finds the global maximum.  On
    success returns (1.0, tau); tau is snapped to a nearby simple decimal
    when that does not hurt the certificate.  Returns None when the global
    maximum is certifiably below -tol * (||A|| + ||B||).
    """
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    if a.data == b.data:
        raise ValueError("the pair certificate needs two distinct matrices")
    scale = a.norm() + b.norm()
    if scale == 0.0:
        return 1.0, 1.0  # O + O is psd

    def phi(mu):
        return lambda_min(combine(mu, a, 1.0 - mu, b))

    lo, hi = 0.0, 1.0
    c = hi - _INVPHI * (hi - lo)
    e = lo + _INVPHI * (hi - lo)
    fc, fe = phi(c), phi(e)
    for _ in range(_GOLDEN_ITERS):
        if fc >= fe:
            hi, e, fe = e, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = phi(c)
        else:
            lo, c, fc = c, e, fe
            e = lo + _INVPHI * (hi - lo)
            fe = phi(e)
    mu = (lo + hi) / 2.0
    mu = min(max(mu, 1e-12), 1.0 - 1e-12)
    tau = (1.0 - mu) / mu

    candidates = []
    for t in (float(round(tau)), round(tau, 1), round(tau, 3), round(tau, 6),
              round(tau, 9), round(tau, 12), tau):
        if t > 0.0 and t not in candidates:
            candidates.append(t)
    evaluated = [(t, lambda_min(combine(1.0, a, t, b)) / (1.0 + t)) for t in candidates]
    best_val = max(v for _, v in evaluated)
    for t, v in evaluated:  # earliest = simplest within snapping slack
        if v >= best_val - 1e-12 * scale:
            tau, val = t, v
            break
    if val * (1.0 + tau) >= -tol * scale:
        return 1.0, tau
    return None
