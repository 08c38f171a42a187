"""MILP formulations of the MCM problem in four flavors.

Variable naming (stable across runs, one block per adder ``a``)::

    u_a                usage
    csel_a_{l,r}_k     input selection of node k < a
    sigma_a_s          left shift one-hot, s in [0, S_max]
    psineg_a_n         negative shift one-hot, n in [0, -S_min]
    phil_a, phir_a     left / right operand negated
    cl_a, cr_a, cshl_a, cnsh_a, c_a, codd_a
    o_a_j              adder a realizes odd target j
    adl_a, adr_a, admx_a, ad_a, admax
    mu_a_m, muS_a_m    one-hot MSB of the output / of the sum before the negative shift
    msb_a, msbS_a, msbl_a, msbr_a, g_a, carry_a, B_a
    tl_a, tr_a, z_a, einf_a, esup_a (truncated flavor)

The metric variables follow the conventions documented in
:mod:`mcmopt.graph.analysis` exactly, so a decoded graph can be recounted and
compared value by value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..milp import (
    LinExpr,
    MilpModel,
    Var,
    add_indicator,
    define,
    encode_and,
    encode_greater,
    encode_max,
    encode_min,
    encode_one_hot_table,
    encode_or,
    one_hot_value,
)
from ..numeric import ad_lower_bound, msb_index
from .instance import Instance, InstanceError


class TriviallyInfeasible(InstanceError):
    """The instance is infeasible for a reason detected before any solve."""


@dataclass
class ModelBundle:
    model: MilpModel
    instance: Instance
    flavor: str
    roles: dict[str, tuple] = field(default_factory=dict)
    targets: list[int] = field(default_factory=list)  # odd targets, index j of o_a_j
    n_adders: int = 0
    sizes: dict[str, int] = field(default_factory=dict)


def _const(v: int) -> LinExpr:
    return LinExpr({}, v)


def _ev(expr, values) -> int:
    return (expr.expr() if isinstance(expr, Var) else expr).value(values)


def _selected(values, sel: dict[int, Var], exprs: dict[int, LinExpr]) -> int:
    for k, var in sel.items():
        if values[var.name] == 1:
            return exprs[k].value(values)
    raise ValueError("no input selected")


def _onehot_index(values, sel: dict[int, Var]) -> int:
    for k, var in sel.items():
        if values[var.name] == 1:
            return k
    raise ValueError("empty one-hot")


class _Builder:
    def __init__(self, inst: Instance, flavor: str, native: bool):
        self.inst = inst
        self.flavor = flavor
        self.depth = flavor != "adders"
        self.bits = flavor in ("bits", "truncated")
        self.trunc = flavor == "truncated"
        self.m = MilpModel(name=f"mcm_{flavor}", indicator_mode="native" if native else "bigM")
        self.roles: dict[str, tuple] = {}

        self.N = inst.n_adders
        self.W = 1 << inst.w
        self.S = inst.shift_max
        self.NS = inst.neg_shift_max
        self.targets = inst.odd_targets
        budgets = inst.odd_budgets()
        self.budgets = {j: budgets[t] for j, t in enumerate(self.targets)} if self.trunc else {}
        self.E = max(self.budgets.values(), default=0)
        self.xmax = inst.x_max
        self.M = msb_index(self.xmax * 2 * self.W + self.E) if self.bits else 0
        # A truncation above the known zeros costs at least 2**(t-1) <= E, so
        # trailing zeros and right truncations stay below Z and left ones below Z + S.
        self.Z = self.E.bit_length() if self.trunc else 0
        self.T = self.Z + self.S if self.trunc else 0
        self.G = max(self.M + 1, self.S, self.T)

        # per-node expressions, node 0 is the input
        self.c = {0: _const(1)}
        self.u: dict[int, Var] = {}
        self.ad = {0: _const(0)}
        self.msb = {0: _const(msb_index(self.xmax))}
        self.z = {0: _const(0)}
        self.einf = {0: _const(0)}
        self.esup = {0: _const(0)}
        self.B: dict[int, Var] = {}

    # -- helpers --

    def var(self, name, lower, upper, role=None, primary=False, binary=False) -> Var:
        if binary:
            v = self.m.binary(name, primary=primary)
        else:
            v = self.m.integer(name, lower, upper, primary=primary)
        if role is not None:
            self.roles[name] = role
        return v

    def ind(self, guard, value, body, name):
        return add_indicator(self.m, guard, value, body, name)

    def select(self, a, side, sel, target: Var, exprs, tag):
        """``target = exprs[k]`` for the selected input k."""
        for k, s in sel.items():
            self.ind(s, 1, target - exprs[k] == 0, f"{tag}_{a}_{side}_{k}")
        self.m.derive([target], lambda v: {target.name: _selected(v, sel, exprs)})

    # -- blocks --

    def adder(self, a: int) -> None:
        m = self.m
        u = self.var(f"u_{a}", 0, 1, ("usage", a), primary=True, binary=True)
        self.u[a] = u
        csel = {
            side: {k: self.var(f"csel_{a}_{side}_{k}", 0, 1, ("select", a, side, k), True, True) for k in range(a)}
            for side in "lr"
        }
        sigma = {s: self.var(f"sigma_{a}_{s}", 0, 1, ("shift", a, s), True, True) for s in range(self.S + 1)}
        psineg = {n: self.var(f"psineg_{a}_{n}", 0, 1, ("negshift", a, n), True, True) for n in range(self.NS + 1)}
        phil = self.var(f"phil_{a}", 0, 1, ("negate", a, "l"), True, True)
        phir = self.var(f"phir_{a}", 0, 1, ("negate", a, "r"), True, True)
        s_expr = LinExpr.sum(s * v for s, v in sigma.items())
        ns_expr = LinExpr.sum(n * v for n, v in psineg.items())

        W = self.W
        cl = self.var(f"cl_{a}", 0, W)
        cr = self.var(f"cr_{a}", 0, W)
        cshl = self.var(f"cshl_{a}", 0, 2 * W)
        cnsh = self.var(f"cnsh_{a}", 0, 2 * W)
        c = self.var(f"c_{a}", 0, W, ("fundamental", a))
        codd = self.var(f"codd_{a}", 0, W // 2)
        plu = self.var(f"plu_{a}", 0, 1, binary=True)

        def core(v, a=a, sel=csel, sg=sigma, ps=psineg):
            left = _selected(v, sel["l"], self.c)
            right = _selected(v, sel["r"], self.c)
            sl = -1 if v[phil.name] else 1
            sr = -1 if v[phir.name] else 1
            shifted = left << _onehot_index(v, sg)
            total = sl * shifted + sr * right
            fund = total >> _onehot_index(v, ps) if total > 0 else 0
            return {
                cl.name: left,
                cr.name: right,
                cshl.name: shifted,
                cnsh.name: total,
                c.name: fund,
                codd.name: fund // 2,
                plu.name: 1 - v[phil.name] - v[phir.name],
            }

        m.derive([cl, cr, cshl, cnsh, c, codd, plu], core)

        # input selection (C6/C7), no reference to an unused adder
        for side, target in (("l", cl), ("r", cr)):
            m.add(LinExpr.sum(csel[side].values()) == 1, f"sel_{a}_{side}")
            self.select(a, side, csel[side], target, self.c, "link")
            for k in range(1, a):
                m.add(csel[side][k] - self.u[k] <= 0, f"dangle_{a}_{side}_{k}")
        # left shift table (C8/C9)
        m.add(LinExpr.sum(sigma.values()) == 1, f"shift_{a}")
        encode_one_hot_table(m, sigma, cl, cshl, name=f"shl_{a}", add_sum=False)
        # negative shift (C2/C3/C4)
        m.add(LinExpr.sum(psineg.values()) == 1, f"nsh_{a}")
        encode_one_hot_table(m, psineg, c, cnsh, name=f"nshv_{a}", add_sum=False)
        m.add(sigma[0] - LinExpr.sum(v for n, v in psineg.items() if n > 0) == 0, f"C4_{a}")
        # signs (C10)
        m.add(phil + phir <= 1, f"signs_{a}")
        m.add(plu + phil + phir == 1, f"plus_{a}")
        self.ind(plu, 1, cnsh - cshl - cr == 0, f"sum_pp_{a}")
        self.ind(phil, 1, cnsh + cshl - cr == 0, f"sum_mp_{a}")
        self.ind(phir, 1, cnsh - cshl + cr == 0, f"sum_pm_{a}")
        # oddness and usage (C5)
        m.add(c - 2 * codd - u == 0, f"C5_{a}")
        m.add(c - W * u <= 0, f"use_{a}")
        if self.inst.symmetry_breaking and a > 1:
            m.add(self.u[a - 1] - u >= 0, f"sym_{a}")
        self.c[a] = c.expr()

        if self.depth:
            self.depth_block(a, csel, u)
        if self.bits:
            self.bits_block(a, u, csel, sigma, psineg, phil, phir, plu, s_expr, ns_expr, cnsh, c)

    def depth_block(self, a, csel, u):
        adl = self.var(f"adl_{a}", 0, a - 1)
        adr = self.var(f"adr_{a}", 0, a - 1)
        self.select(a, "l", csel["l"], adl, self.ad, "adsel")
        self.select(a, "r", csel["r"], adr, self.ad, "adsel")
        admx = self.var(f"admx_{a}", 0, a - 1)
        encode_max(self.m, admx, [adl, adr], f"admx_{a}")
        ad = self.var(f"ad_{a}", 0, a, ("depth", a))
        define(self.m, ad, admx + u, f"ad_{a}")
        self.ad[a] = ad.expr()

    def bits_block(self, a, u, csel, sigma, psineg, phil, phir, plu, s_expr, ns_expr, cnsh, c):
        m = self.m
        zero = _const(0)
        tl = tr = zero
        einf = esup = zero
        if self.trunc:
            tl, tr, einf, esup = self.trunc_block(a, csel, sigma, phil, phir, plu, s_expr, ns_expr, cnsh)

        # MSB pins for the output and for the sum before the negative shift
        for kind, value in (("mu", self.xmax * c + esup), ("muS", self.xmax * cnsh + esup)):
            mu = {j: self.var(f"{kind}_{a}_{j}", 0, 1, binary=True) for j in range(self.M + 1)}
            m.add(LinExpr.sum(mu.values()) - u == 0, f"{kind}_{a}")
            for j, var in mu.items():
                self.ind(var, 1, value >= 1 << j, f"{kind}_lo_{a}_{j}")
                self.ind(var, 1, value <= (1 << (j + 1)) - 1, f"{kind}_hi_{a}_{j}")

            def pin(v, mu=mu, value=value):
                x = value.value(v)
                top = msb_index(x) if x > 0 else -1
                return {var.name: int(j == top) for j, var in mu.items()}

            m.derive(mu.values(), pin)
            tag = "msb" if kind == "mu" else "msbS"
            mvar = self.var(f"{tag}_{a}", 0, self.M, (tag, a))
            define(m, mvar, LinExpr.sum(j * var for j, var in mu.items()), f"{tag}_{a}")
            if kind == "mu":
                msb = mvar
            else:
                msbS = mvar
        self.msb[a] = msb.expr()

        msbl = self.var(f"msbl_{a}", 0, self.M)
        msbr = self.var(f"msbr_{a}", 0, self.M)
        self.select(a, "l", csel["l"], msbl, self.msb, "msbsel")
        self.select(a, "r", csel["r"], msbr, self.msb, "msbsel")
        hi_l = msbl + s_expr
        hi_r = msbr.expr()
        if self.trunc:
            m.add(tl - hi_l <= 0, f"tl_range_{a}")
            m.add(tr - hi_r <= 0, f"tr_range_{a}")
            lol = self.var(f"lol_{a}", 0, max(self.S, self.T))
            encode_max(m, lol, [s_expr, tl], f"lol_{a}")
            lo_l = lol.expr()
        else:
            lo_l = s_expr
        lo_r = tr

        # gain cases
        nov1 = self.var(f"nov1_{a}", 0, 1, binary=True)
        encode_greater(m, nov1, lo_l, hi_r, f"nov1_{a}")
        if self.trunc:
            nov2 = self.var(f"nov2_{a}", 0, 1, binary=True)
            encode_greater(m, nov2, lo_r, hi_l, f"nov2_{a}")
            nov = self.var(f"nov_{a}", 0, 1, binary=True)
            encode_or(m, nov, nov1, nov2, f"nov_{a}")
            glo = self.var(f"glo_{a}", 0, max(self.S, self.T))
            encode_max(m, glo, [lo_l, lo_r], f"glo_{a}")
        else:
            nov = nov1
            glo = lo_l
        kap = self.var(f"kap_{a}", 0, 1, binary=True)
        encode_and(m, kap, plu, nov, f"kap_{a}")
        pi = self.var(f"pi_{a}", 0, 1, binary=True)
        define(m, pi, plu - kap, f"pi_{a}")
        hmx = self.var(f"hmx_{a}", 0, self.M + self.S)
        encode_max(m, hmx, [hi_l, hi_r], f"hmx_{a}")

        g = self.var(f"g_{a}", 0, self.G, ("gain", a))
        carry = self.var(f"carry_{a}", 0, 1, ("carry", a))
        self.ind(kap, 1, g - msbS - 1 == 0, f"g_nov_{a}")
        self.ind(kap, 1, carry == 0, f"psi_nov_{a}")
        self.ind(pi, 1, g - glo == 0, f"g_pp_{a}")
        self.ind(pi, 1, carry - msbS + hmx == 0, f"psi_pp_{a}")
        self.ind(phir, 1, g - lo_r == 0, f"g_pm_{a}")
        self.ind(phir, 1, carry == 0, f"psi_pm_{a}")
        self.ind(phil, 1, g - lo_l == 0, f"g_mp_{a}")
        self.ind(phil, 1, carry == 0, f"psi_mp_{a}")

        def gain(v):
            if v[kap.name]:
                return {g.name: v[msbS.name] + 1, carry.name: 0}
            if v[pi.name]:
                return {g.name: _ev(glo, v), carry.name: v[msbS.name] - v[hmx.name]}
            if v[phir.name]:
                return {g.name: _ev(lo_r, v), carry.name: 0}
            return {g.name: _ev(lo_l, v), carry.name: 0}

        m.derive([g, carry], gain)

        B = self.var(f"B_{a}", 0, self.M + 1, ("onebit", a))
        self.ind(u, 1, B - msbS - 1 + g + carry == 0, f"B_{a}")
        self.ind(u, 0, B == 0, f"B_off_{a}")
        m.derive([B], lambda v: {B.name: (v[msbS.name] + 1 - v[g.name] - v[carry.name]) if v[u.name] else 0})
        self.B[a] = B

    def trunc_block(self, a, csel, sigma, phil, phir, plu, s_expr, ns_expr, cnsh):
        m, E, Z = self.m, self.E, self.Z
        top = {"l": self.T, "r": Z}
        t_vars = {}
        p2t = {}
        taus = {}
        for side in "lr":
            t = self.var(f"t{side}_{a}", 0, top[side], ("trunc", a, side), primary=True)
            tau = {k: self.var(f"tau_{a}_{side}_{k}", 0, 1, binary=True) for k in range(top[side] + 1)}
            one_hot_value(m, tau, t, f"tau_{a}_{side}")
            t_vars[side] = t
            taus[side] = tau
            p2t[side] = LinExpr.sum((1 << k) * v for k, v in tau.items())
        # 0 < t_l <= s clears only shifted-in zeros: same node as t_l = 0
        for s in range(1, self.S + 1):
            for k in range(1, min(s, self.T) + 1):
                m.add(sigma[s] + taus["l"][k] <= 1, f"tdom_{a}_{s}_{k}")

        # trailing zeros of the selected inputs, left one moved by the shift
        zsel = {}
        for side in "lr":
            zsel[side] = self.var(f"zsel_{a}_{side}", 0, Z)
            self.select(a, side, csel[side], zsel[side], self.z, "zsel")
        zl = zsel["l"] + s_expr
        etr = {}
        for side, zc in (("l", zl), ("r", zsel["r"].expr())):
            zeta = {k: self.var(f"zeta_{a}_{side}_{k}", 0, 1, binary=True) for k in range(top[side] + 1)}
            one_hot_value(m, zeta, zc, f"zeta_{a}_{side}")
            p2z = LinExpr.sum((1 << k) * v for k, v in zeta.items())
            et = self.var(f"et{side}_{a}", 0, E)
            encode_max(m, et, [p2t[side] - p2z, _const(0)], f"et{side}_{a}")
            etr[side] = et
        low_l = self.var(f"lowl_{a}", 0, self.T)
        encode_max(m, low_l, [zl, t_vars["l"]], f"lowl_{a}")
        low_r = self.var(f"lowr_{a}", 0, Z)
        encode_max(m, low_r, [zsel["r"], t_vars["r"]], f"lowr_{a}")
        mnlow = self.var(f"mnlow_{a}", 0, Z)
        encode_min(m, mnlow, [low_l, low_r], f"mnlow_{a}")
        z = self.var(f"z_{a}", 0, Z, ("zeros", a))
        encode_max(m, z, [mnlow - ns_expr, _const(0)], f"z_{a}")
        self.z[a] = z.expr()

        # error intervals of the operands (before the sign)
        ei = {}
        es = {}
        for side in "lr":
            ei[side] = self.var(f"eisel_{a}_{side}", 0, E)
            es[side] = self.var(f"essel_{a}_{side}", 0, E)
            self.select(a, side, csel[side], ei[side], self.einf, "eisel")
            self.select(a, side, csel[side], es[side], self.esup, "essel")
        eish = self.var(f"eish_{a}", 0, E)
        essh = self.var(f"essh_{a}", 0, E)
        encode_one_hot_table(m, sigma, ei["l"], eish, name=f"eish_{a}", add_sum=False)
        encode_one_hot_table(m, sigma, es["l"], essh, name=f"essh_{a}", add_sum=False)
        m.derive(
            [eish, essh],
            lambda v: {
                eish.name: v[ei["l"].name] << _onehot_index(v, sigma),
                essh.name: v[es["l"].name] << _onehot_index(v, sigma),
            },
        )
        inf_l, sup_l = eish + etr["l"], essh.expr()
        inf_r, sup_r = ei["r"] + etr["r"], es["r"].expr()

        einf = self.var(f"einf_{a}", 0, E, ("einf", a))
        esup = self.var(f"esup_{a}", 0, E, ("esup", a))
        cases = (
            (plu, inf_l + inf_r, sup_l + sup_r, "pp"),
            (phil, sup_l + inf_r, inf_l + sup_r, "mp"),
            (phir, inf_l + sup_r, sup_l + inf_r, "pm"),
        )
        for guard, lo, hi, tag in cases:
            self.ind(guard, 1, einf - lo == 0, f"einf_{tag}_{a}")
            self.ind(guard, 1, esup - hi == 0, f"esup_{tag}_{a}")

        def errors(v):
            for guard, lo, hi, _ in cases:
                if v[guard.name]:
                    return {einf.name: lo.value(v), esup.name: hi.value(v)}
            raise ValueError("no sign case active")

        m.derive([einf, esup], errors)
        # no negative intermediate value on subtractions
        self.ind(phil, 1, einf - cnsh <= 0, f"negdp_mp_{a}")
        self.ind(phir, 1, einf - cnsh <= 0, f"negdp_pm_{a}")
        self.einf[a] = einf.expr()
        self.esup[a] = esup.expr()
        return t_vars["l"].expr(), t_vars["r"].expr(), einf.expr(), esup.expr()

    def outputs(self) -> None:
        m = self.m
        for j, target in enumerate(self.targets):
            o = {a: self.var(f"o_{a}_{j}", 0, 1, ("output", a, j), True, True) for a in range(1, self.N + 1)}
            m.add(LinExpr.sum(o.values()) == 1, f"cover_{j}")
            lb = ad_lower_bound(target)
            for a, var in o.items():
                self.ind(var, 1, self.c[a] == target, f"out_{a}_{j}")
                if self.depth and lb > 1:
                    m.add(self.ad[a] - lb * var >= 0, f"adlb_{a}_{j}")
                if self.trunc:
                    self.ind(var, 1, self.einf[a] <= self.budgets[j], f"budget_inf_{a}_{j}")
                    self.ind(var, 1, self.esup[a] <= self.budgets[j], f"budget_sup_{a}_{j}")

    def build(self) -> ModelBundle:
        inst = self.inst
        if inst.ad_bound is not None and self.targets:
            need = max(ad_lower_bound(t) for t in self.targets)
            if inst.ad_bound < need:
                raise TriviallyInfeasible(f"adder depth bound {inst.ad_bound} is below the lower bound {need}")
        for a in range(1, self.N + 1):
            self.adder(a)
        self.outputs()
        usage = LinExpr.sum(self.u.values())
        if self.depth:
            admax = self.var("admax", 0, self.N, ("admax",))
            encode_max(self.m, admax, [self.ad[a] for a in range(1, self.N + 1)], "admax")
            if inst.ad_bound is not None:
                self.m.add(admax <= inst.ad_bound, "ad_bound")
        if self.flavor == "adders":
            self.m.minimize(usage)
        elif self.flavor == "adders_ad":
            self.m.minimize(self.N * usage + admax)
        else:
            self.m.minimize(self.N * LinExpr.sum(self.B.values()) + admax)
        self.m.metadata.update(
            {
                "flavor": self.flavor,
                "targets": ",".join(map(str, self.targets)) or "-",
                "adders": str(self.N),
                "wordlength": str(inst.w),
            }
        )
        return ModelBundle(
            model=self.m,
            instance=inst,
            flavor=self.flavor,
            roles=self.roles,
            targets=list(self.targets),
            n_adders=self.N,
            sizes={"W": self.W, "S_max": self.S, "NS_max": self.NS, "M": self.M, "T": self.T, "Z": self.Z, "E": self.E},
        )


def build(instance: Instance, flavor: str | None = None, native_indicators: bool = False) -> ModelBundle:
    return _Builder(instance, flavor or instance.metric, native_indicators).build()


def build_mcm_adders(instance: Instance, **kw) -> ModelBundle:
    return build(instance, "adders", **kw)


def build_mcm_ad(instance: Instance, **kw) -> ModelBundle:
    return build(instance, "adders_ad", **kw)


def build_mcm_bits(instance: Instance, **kw) -> ModelBundle:
    if instance.input_wordlength is None:
        raise InstanceError("missing input word length for the one-bit adder model")
    return build(instance, "bits", **kw)


def build_tmcm(instance: Instance, **kw) -> ModelBundle:
    if instance.input_wordlength is None:
        raise InstanceError("missing input word length for the truncated model")
    if instance.budgets is None:
        raise InstanceError("missing error budgets for the truncated model")
    return build(instance, "truncated", **kw)
