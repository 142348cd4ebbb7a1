"""Element-pair integration on uniform 1D P1 meshes.

Element ``e`` spans ``[xl[e], xl[e] + h]`` and owns the unfolded nodes ``e``
and ``e + 1``; periodic meshes fold node ``n_el`` onto node ``0`` afterwards.
All coefficient evaluations go through a symmetric ``theta_s(x, z)``.

Pair classes, by signed element offset ``m``:

* ``m = 0``    identical, transformed to the difference variable,
* ``|m| = 1``  touching, Duffy-collapsed at the shared vertex,
* ``2 <= |m| <= far_field_threshold``  tensor Gauss of ``gauss_order``,
* ``|m| = N/2`` on the torus  split along the minimal-image cut,
* otherwise    tensor Gauss of ``far_order`` through a blocked point kernel.
"""

import numpy as np

from .quadrature import gauss_legendre, radial_rule, triangle_rule

_BLOCK_ENTRIES = 4_000_000


class ElementPairs:
    def __init__(self, xl, h, theta_s, alpha, quad, wrap=False, active=None):
        self.xl = np.asarray(xl, dtype=float)
        self.h = float(h)
        self.n_el = self.xl.size
        self.theta_s = theta_s
        self.alpha = float(alpha)
        self.p = -(1.0 + self.alpha) / 2.0  # gamma ~ sign(d) |d|^p
        self.quad = quad
        self.wrap = wrap
        self.active = np.ones(self.n_el, bool) if active is None else np.asarray(active, bool)
        n = self.n_el
        thr = quad.far_field_threshold
        if wrap:
            self.half = n // 2
            thr = min(thr, self.half - 1)
        self.thr = thr

    # -- pair lists ----------------------------------------------------

    def _keep(self, e, f):
        return self.active[e] | self.active[f]

    def _touching(self):
        e = np.arange(self.n_el if self.wrap else self.n_el - 1)
        f = (e + 1) % self.n_el
        keep = self._keep(e, f)
        return e[keep], f[keep]

    def _near(self):
        es, fs, ms = [], [], []
        for m in range(2, self.thr + 1):
            e = np.arange(self.n_el if self.wrap else self.n_el - m)
            f = (e + m) % self.n_el
            keep = self._keep(e, f)
            es.append(e[keep])
            fs.append(f[keep])
            ms.append(np.full(keep.sum(), m))
        if not es:
            z = np.zeros(0, int)
            return z, z, z
        return np.concatenate(es), np.concatenate(fs), np.concatenate(ms)

    def _far_mask(self, e, f):
        m = f[None, :] - e[:, None]
        if self.wrap:
            m = np.mod(m + self.half, self.n_el) - self.half
            mask = (np.abs(m) > self.thr) & (m != -self.half)
        else:
            mask = np.abs(m) > self.thr
        return mask & (self.active[e][:, None] | self.active[f][None, :])

    def _displacement(self, d):
        if self.wrap:
            return d - np.round(d)
        return d

    # -- stiffness of the symmetric form ---------------------------------

    def form_matrix(self):
        """Unfolded matrix of ``1/2 iint theta (u(x)-u(z))(v(x)-v(z)) nu``."""
        A = np.zeros((self.n_el + 1, self.n_el + 1))
        self._identical_form(A)
        self._touching_form(A)
        self._near_form(A)
        if self.wrap:
            self._cut_form(A)
        self._far(A, None)
        return A

    def _identical_form(self, A):
        q, a, h = self.quad, self.alpha, self.h
        e = np.nonzero(self.active)[0]
        if e.size == 0:
            return
        d, wd = radial_rule(q.gauss_order, 1.0 - a, q.duffy_refinement)
        s, ws = gauss_legendre(q.gauss_order)
        xi = d[:, None] + (1.0 - d[:, None]) * s[None, :]
        zeta = xi - d[:, None]
        x = self.xl[e, None, None] + h * xi
        z = self.xl[e, None, None] + h * zeta
        th = self.theta_s(x, z)
        integral = 2.0 * np.einsum("eds,d,s->e", th, wd * (1.0 - d), ws)
        c = 0.5 * h ** (1.0 - a) * integral
        np.add.at(A, (e, e), c)
        np.add.at(A, (e + 1, e + 1), c)
        np.add.at(A, (e, e + 1), -c)
        np.add.at(A, (e + 1, e), -c)

    def _duffy_points(self, beta):
        q = self.quad
        r, wr = radial_rule(q.gauss_order, beta, q.duffy_refinement)
        w, ww = gauss_legendre(q.gauss_order)
        R, W = np.meshgrid(r, w, indexing="ij")
        weight = np.outer(wr, ww)
        return R, W, weight

    def _touching_form(self, A):
        e, f = self._touching()
        if e.size == 0:
            return
        a, h = self.alpha, self.h
        R, W, weight = self._duffy_points(2.0 - a)
        xk = self.xl[e] + h
        M = np.zeros((e.size, 2, 2))
        for xi, zeta, m1, m2 in ((R, R * W, 1.0, W), (R * W, R, W, 1.0)):
            th = self.theta_s(xk[:, None, None] - h * xi, xk[:, None, None] + h * zeta)
            base = th * ((1.0 + W) ** (-1.0 - a) * weight)
            m1 = np.broadcast_to(m1, W.shape)
            m2 = np.broadcast_to(m2, W.shape)
            M[:, 0, 0] += np.einsum("erw,rw->e", base, m1 * m1)
            M[:, 0, 1] += np.einsum("erw,rw->e", base, m1 * m2)
            M[:, 1, 1] += np.einsum("erw,rw->e", base, m2 * m2)
        M[:, 1, 0] = M[:, 0, 1]
        G = np.array([[-1.0, 1.0, 0.0], [0.0, -1.0, 1.0]])
        local = h ** (1.0 - a) * np.einsum("ai,eab,bj->eij", G, M, G)
        dofs = np.stack([e, e + 1, f + 1], axis=1)
        _scatter(A, dofs, local)

    def _near_form(self, A):
        e, f, m = self._near()
        if e.size == 0:
            return
        h = self.h
        t, w = gauss_legendre(self.quad.gauss_order)
        x = self.xl[e, None, None] + h * t[None, :, None]
        z = self.xl[e, None, None] + h * (m[:, None, None] + t[None, None, :])
        K = self.theta_s(x, z) * np.abs(z - x) ** (-1.0 - self.alpha) * (np.outer(w, w) * h * h)
        psi = np.stack([1.0 - t, t], axis=1)
        local = _local_four(K, psi, psi)
        dofs = np.stack([e, e + 1, f, f + 1], axis=1)
        _scatter(A, dofs, local)

    def _cut_points(self, e):
        lo_xi, lo_zeta, lo_w = triangle_rule(self.quad.gauss_order)
        xi = np.concatenate([lo_xi, lo_zeta])
        zeta = np.concatenate([lo_zeta, lo_xi])
        w = np.concatenate([lo_w, lo_w])
        x = self.xl[e, None] + self.h * xi
        z = self.xl[e, None] + self.h * (self.half + zeta)
        return xi, zeta, w, x, z

    def _cut_form(self, A):
        e = np.arange(self.half)
        f = e + self.half
        xi, zeta, w, x, z = self._cut_points(e)
        d = self._displacement(z - x)
        K = self.theta_s(x, z) * np.abs(d) ** (-1.0 - self.alpha) * (w * self.h ** 2)
        c = np.stack([1.0 - xi, xi, -(1.0 - zeta), -zeta], axis=1)
        local = np.einsum("eq,qa,qb->eab", K, c, c)
        dofs = np.stack([e, e + 1, f, f + 1], axis=1)
        _scatter(A, dofs, local)

    # -- load vector of the D* functional --------------------------------

    def dstar_load(self):
        """Unfolded vector ``b_i = - iint theta (phi_i(z) - phi_i(x)) gamma(x, z)``."""
        b = np.zeros(self.n_el + 1)
        self._identical_load(b)
        self._touching_load(b)
        self._near_load(b)
        if self.wrap:
            self._cut_load(b)
        self._far(None, b)
        return b

    def _identical_load(self, b):
        q, h, p = self.quad, self.h, self.p
        e = np.nonzero(self.active)[0]
        d, wd = radial_rule(q.gauss_order, p + 1.0, q.duffy_refinement)
        s, ws = gauss_legendre(q.gauss_order)
        xi = d[:, None] + (1.0 - d[:, None]) * s[None, :]
        zeta = xi - d[:, None]
        th = self.theta_s(self.xl[e, None, None] + h * xi, self.xl[e, None, None] + h * zeta)
        integral = 2.0 * np.einsum("eds,d,s->e", th, wd * (1.0 - d), ws)
        c = h ** (2.0 + p) * integral
        np.add.at(b, e, c)
        np.add.at(b, e + 1, -c)

    def _touching_load(self, b):
        e, f = self._touching()
        if e.size == 0:
            return
        h, p = self.h, self.p
        R, W, weight = self._duffy_points(p + 2.0)
        xk = self.xl[e] + h
        V = np.zeros((e.size, 3))
        one = np.ones_like(W)
        for xi, zeta, vec in ((R, R * W, (-one, 1.0 - W, W)), (R * W, R, (-W, W - 1.0, one))):
            th = self.theta_s(xk[:, None, None] - h * xi, xk[:, None, None] + h * zeta)
            base = th * ((1.0 + W) ** p * weight)
            for j in range(3):
                V[:, j] += np.einsum("erw,rw->e", base, vec[j])
        local = -2.0 * h ** (2.0 + p) * V
        np.add.at(b, np.stack([e, e + 1, f + 1], axis=1), local)

    def _near_load(self, b):
        e, f, m = self._near()
        if e.size == 0:
            return
        h = self.h
        t, w = gauss_legendre(self.quad.gauss_order)
        x = self.xl[e, None, None] + h * t[None, :, None]
        z = self.xl[e, None, None] + h * (m[:, None, None] + t[None, None, :])
        K = self.theta_s(x, z) * _gamma(z - x, self.p) * (np.outer(w, w) * h * h)
        v = np.stack([-np.einsum("egk,g->e", K, 1.0 - t), -np.einsum("egk,g->e", K, t),
                      np.einsum("egk,k->e", K, 1.0 - t), np.einsum("egk,k->e", K, t)], axis=1)
        np.add.at(b, np.stack([e, e + 1, f, f + 1], axis=1), -2.0 * v)

    def _cut_load(self, b):
        e = np.arange(self.half)
        f = e + self.half
        xi, zeta, w, x, z = self._cut_points(e)
        d = self._displacement(z - x)
        K = self.theta_s(x, z) * _gamma(d, self.p) * (w * self.h ** 2)
        c = np.stack([-(1.0 - xi), -xi, 1.0 - zeta, zeta], axis=1)
        v = K @ c
        np.add.at(b, np.stack([e, e + 1, f, f + 1], axis=1), -2.0 * v)

    # -- far field through blocked point kernels ---------------------------

    def _row_blocks(self):
        n_g = self.quad.far_order
        runs = []
        start = 0
        flags = self.active
        for k in range(1, self.n_el + 1):
            if k == self.n_el or flags[k] != flags[start]:
                runs.append((start, k, bool(flags[start])))
                start = k
        act = np.nonzero(self.active)[0]
        for lo, hi, is_active in runs:
            cols = np.arange(self.n_el) if is_active else act
            if cols.size == 0:
                continue
            size = max(1, _BLOCK_ENTRIES // (n_g * n_g * cols.size))
            for e0 in range(lo, hi, size):
                yield np.arange(e0, min(e0 + size, hi)), cols

    def _far(self, A, b):
        n_g = self.quad.far_order
        t, w = gauss_legendre(n_g)
        psi = np.stack([1.0 - t, t], axis=1)
        X = self.xl[:, None] + self.h * t[None, :]
        wts = np.outer(w, w) * self.h ** 2
        for rows, cols in self._row_blocks():
            mask = self._far_mask(rows, cols)
            if not mask.any():
                continue
            x = X[rows][:, :, None, None]
            z = X[cols][None, None, :, :]
            d = self._displacement(z - x)
            d = np.where(mask[:, None, :, None], d, 1.0)
            th = self.theta_s(x, z)
            scale = wts[None, :, None, :] * mask[:, None, :, None]
            if A is not None:
                K = th * np.abs(d) ** (-1.0 - self.alpha) * scale
                rs = K.sum(axis=(2, 3))
                diag = np.einsum("eg,ga,gb->eab", rs, psi, psi)
                C = np.einsum("egfb,ga->eafb", K @ psi, psi)
                r0 = rows[0]
                nr = rows.size
                c0 = cols[0]
                contiguous = cols[-1] - c0 + 1 == cols.size
                for a in range(2):
                    for bb in range(2):
                        if contiguous:
                            A[r0 + a:r0 + a + nr, c0 + bb:c0 + bb + cols.size] -= C[:, a, :, bb]
                        else:
                            A[np.ix_(rows + a, cols + bb)] -= C[:, a, :, bb]
                        np.add.at(A, (rows + a, rows + bb), diag[:, a, bb])
            if b is not None:
                K = th * _gamma(d, self.p) * scale
                rs = K.sum(axis=(2, 3))
                np.add.at(b, rows, 2.0 * rs @ psi[:, 0])
                np.add.at(b, rows + 1, 2.0 * rs @ psi[:, 1])


def _gamma(d, p):
    return np.sign(d) * np.abs(d) ** p


def _local_four(K, psi_x, psi_z):
    """``iint K c c^T`` for ``c = [psi_x, -psi_z]`` with tensor weights in ``K``."""
    rs_x = K.sum(axis=2)
    rs_z = K.sum(axis=1)
    xx = np.einsum("eg,ga,gb->eab", rs_x, psi_x, psi_x)
    zz = np.einsum("ek,ka,kb->eab", rs_z, psi_z, psi_z)
    xz = -np.einsum("egk,ga,kb->eab", K, psi_x, psi_z)
    top = np.concatenate([xx, xz], axis=2)
    bottom = np.concatenate([xz.transpose(0, 2, 1), zz], axis=2)
    return np.concatenate([top, bottom], axis=1)


def _scatter(A, dofs, local):
    n = dofs.shape[1]
    rows = np.repeat(dofs, n, axis=1)
    cols = np.tile(dofs, (1, n))
    np.add.at(A, (rows, cols), local.reshape(local.shape[0], -1))


def fold_periodic(A=None, b=None):
    """Fold unfolded node ``n_el`` onto node ``0``."""
    out = []
    if A is not None:
        A = A.copy()
        A[0, :] += A[-1, :]
        A[:, 0] += A[:, -1]
        out.append(A[:-1, :-1])
    if b is not None:
        b = b.copy()
        b[0] += b[-1]
        out.append(b[:-1])
    return out[0] if len(out) == 1 else tuple(out)
