"""Invariant triples of bundles on the quadric: extraction, synthesis, comparison.

A bundle E without split ACM line-bundle summands is classified by the
triple (M, W, V): its diagonal H1 module M, plus one graded subspace inside
each spinor-twisted companion module of the associated bundle F of M.  W
lives in the O(1,0)-companion and consists of classes killed by u and v;
V mirrors it.  The placement rule ties abstract degree d of W to companion
degree -1 - d; equivalently, a W class in companion degree m accounts for
one O(d, d+1) summand of the ACM middle term of E and one O(d, d-1) column
of its differential, d = -1 - m.

Extraction realises the subspace as the kernel of the comparison map from
the companion modules of F into the twisted H1 of E.  The comparison is a
chain map (lambda, rho) from the minimal presentation of M onto the given
presentation of E; rho is built directly on the chosen module generators,
so the induced map on every H1 piece is onto by construction and kernels
are computed by exact preimages.  For a monad the subspace comes instead
from pushing the one-dimensional H1 of each differential column through
the presentation, and is carried back along the same comparison.

Synthesis walks the opposite way: pick sections of the spinor-twisted F
whose connecting classes hit the requested subspaces, stack them into a
differential out of spinor-inverse twists, enlarge the middle term by a
free part until the dual map is onto on all sections, and return the monad.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .exactla import Matrix, NoSolution, preimage_basis, quotient_data, span_basis, subspace_equal
from .bipoly import BiForm
from .linecoh import (
    FormMatrix,
    SplitBundle,
    Twist,
    form_hstack,
    form_vstack,
    h0_mult_on_split,
    induced_h,
    is_acm_twist,
    is_free_twist,
    spinor_kind,
    split_dim,
)
from .presheaf import (
    InternalInvariantViolation,
    KerPresentation,
    MonadPresentation,
    VerificationFailed,
    _forms_from_vector,
    delta_matrix,
    find_acm_summand,
    image_h1_split,
    solve_form_system,
)
from .flmod import (
    FinLengthModule,
    MinimalPresentation,
    ModelledModule,
    TriDiagModule,
    _commuting_space,
    _vec_to_maps,
    minimal_generators,
    minimal_presentation,
    module_from_bundle,
    sigma_modules,
)


class NotMinimalGamma(ValueError):
    """Input presentation still carries ACM summands or a non-minimal shape."""


class NotGammaForm(ValueError):
    """Kernel presentation whose middle term is not a sum of ACM twists."""


class LiftFailed(RuntimeError):
    """No section maps onto a requested connecting class; socle data invalid."""


class ExactnessViolation(AssertionError):
    """The four-term alternating dimension sum failed in some degree."""


@dataclass
class HorrocksTriple:
    """(M, W, V) in the canonical coordinates of M's minimal presentation.

    W maps companion degree m to a matrix whose columns span the chosen
    subspace of the O(1,0)-companion piece there, in its coker-model
    coordinates; V likewise for the O(0,1) side.
    """

    pres: MinimalPresentation
    T: TriDiagModule
    W: dict[int, Matrix]
    V: dict[int, Matrix]

    @property
    def module(self) -> FinLengthModule:
        return self.pres.module

    @staticmethod
    def build(m: FinLengthModule, w_vectors: dict[int, list], v_vectors: dict[int, list]) -> "HorrocksTriple":
        pres = minimal_presentation(m)
        t = sigma_modules(pres)
        fld = m.field
        w = {}
        for d, vecs in w_vectors.items():
            if vecs:
                dim = t.m10[d].dim if d in t.m10 else 0
                _check_lengths("W", d, vecs, dim)
                w[d] = span_basis(fld, [np.asarray(v) for v in vecs], dim)
        v = {}
        for d, vecs in v_vectors.items():
            if vecs:
                dim = t.m01[d].dim if d in t.m01 else 0
                _check_lengths("V", d, vecs, dim)
                v[d] = span_basis(fld, [np.asarray(v_) for v_ in vecs], dim)
        triple = HorrocksTriple(pres, t, w, v)
        triple.validate()
        return triple

    def validate(self) -> "HorrocksTriple":
        for d, basis in self.W.items():
            if d not in self.T.m10 and basis.cols:
                raise ValueError(f"W touches the empty companion degree {d}")
            for var in ("u", "v"):
                if not (self.T.op(var, "10", d) @ basis).is_zero():
                    raise ValueError(f"W at degree {d} is not killed by {var}")
        for d, basis in self.V.items():
            if d not in self.T.m01 and basis.cols:
                raise ValueError(f"V touches the empty companion degree {d}")
            for var in ("s", "t"):
                if not (self.T.op(var, "01", d) @ basis).is_zero():
                    raise ValueError(f"V at degree {d} is not killed by {var}")
        return self

    def w_dim(self, d: int) -> int:
        return self.W[d].cols if d in self.W else 0

    def v_dim(self, d: int) -> int:
        return self.V[d].cols if d in self.V else 0

    def abstract_w_dims(self) -> dict[int, int]:
        """Abstract grading of W: degree d sits in companion degree -1 - d."""
        return {-1 - m: b.cols for m, b in self.W.items() if b.cols}

    def abstract_v_dims(self) -> dict[int, int]:
        return {-1 - m: b.cols for m, b in self.V.items() if b.cols}

    def summary(self) -> str:
        dims = {d: self.module.dim(d) for d in self.module.support()}
        return f"M {dims}; W {{{_dims_str(self.W)}}}; V {{{_dims_str(self.V)}}}"


def _dims_str(sub: dict[int, Matrix]) -> str:
    return ", ".join(f"{d}: {m.cols}" for d, m in sorted(sub.items()) if m.cols)


def _check_lengths(name: str, d: int, vecs, dim: int):
    for v in vecs:
        if len(v) != dim:
            raise ValueError(
                f"{name} vector at degree {d} has {len(v)} coordinates; the companion piece there has dimension {dim}"
            )


@dataclass
class AcmType:
    """Multiplicities of the ACM middle term: O(i+1,i), O(j,j+1) and free parts."""

    mu: dict[int, int]
    nu: dict[int, int]
    free: dict[int, int]


def acm_type(rep: KerPresentation, triple: HorrocksTriple | None = None) -> AcmType:
    """Read the spinor/free multiplicities off a minimal kernel presentation.

    Cross-checked against the triple when one is supplied: the abstract W
    dimensions must equal the O(0,1)-type counts and V the O(1,0)-type
    counts, degree by degree.
    """
    mu: dict[int, int] = {}
    nu: dict[int, int] = {}
    free: dict[int, int] = {}
    for t in rep.A:
        kind = spinor_kind(t)
        if kind == 1:
            mu[t[1]] = mu.get(t[1], 0) + 1
        elif kind == 2:
            nu[t[0]] = nu.get(t[0], 0) + 1
        elif is_free_twist(t):
            free[t[0]] = free.get(t[0], 0) + 1
        else:
            raise NotGammaForm(f"middle twist {t} is not ACM")
    if triple is not None:
        if triple.abstract_w_dims() != nu or triple.abstract_v_dims() != mu:
            raise NotMinimalGamma(
                f"presentation multiplicities mu={mu}, nu={nu} disagree with the triple "
                f"W={triple.abstract_w_dims()}, V={triple.abstract_v_dims()}"
            )
    return AcmType(mu, nu, free)


# ---------------------------------------------------------------------------
# extraction


def _rho_from_generators(pres: MinimalPresentation, mm: ModelledModule, target: SplitBundle) -> FormMatrix:
    """Columns of the comparison L0' -> B: the chosen generator representatives.

    Generator g of the module in degree d has a representative section of
    B(d, d); as a map O(-d) -> B that section is a column of forms.  The
    induced map on section spaces then covers the identity of the module by
    construction, so the induced map on every H1 piece is an isomorphism.
    """
    fld = pres.module.field
    cols = []
    src = []
    gens = minimal_generators(pres.module)
    for d in sorted(gens):
        reps, _ = gens[d]
        for vec in reps.columns():
            ambient = mm.models[d].reps @ vec
            cols.append(_forms_from_vector(fld, target, (d, d), ambient))
            src.append((-d, -d))
    rows = tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(len(target)))
    return FormMatrix(fld, tuple(src), tuple(target), rows)


def _assert_stripped(rep: KerPresentation):
    found = find_acm_summand(rep)
    if found is not None:
        raise NotMinimalGamma(f"presentation still splits off O{found[0]}; strip it first")


@dataclass
class Extraction:
    triple: HorrocksTriple
    mm: ModelledModule
    rho: FormMatrix
    lam: FormMatrix


def extract_invariants(rep, check_stripped: bool = True) -> Extraction:
    """The invariant triple of a presented bundle without ACM summands.

    Kernel presentations must have an ACM middle term.  The subspaces come
    out in the canonical coordinates of the module's own minimal
    presentation, so two bundles can be compared by comparing triples.
    """
    if isinstance(rep, MonadPresentation):
        return _extract_monad(rep)
    if not all(is_acm_twist(t) for t in rep.A):
        raise NotGammaForm(f"middle twists {list(rep.A)} are not all ACM")
    if check_stripped:
        _assert_stripped(rep)
    mm = module_from_bundle(rep)
    if mm.module.is_zero:
        pres = minimal_presentation(mm.module)
        t = sigma_modules(pres)
        empty = FormMatrix.zero(rep.field, (), rep.B)
        return Extraction(HorrocksTriple(pres, t, {}, {}), mm, empty, empty)
    pres = minimal_presentation(mm.module)
    t = sigma_modules(pres)
    rho = _rho_from_generators(pres, mm, rep.B)
    lam = solve_form_system(rep.g, rho.compose(pres.psi))
    w = _kernel_subspaces(rep, pres, t, rho, side=1)
    v = _kernel_subspaces(rep, pres, t, rho, side=2)
    triple = HorrocksTriple(pres, t, w, v).validate()
    return Extraction(triple, mm, rho, lam)


def _kernel_subspaces(rep: KerPresentation, pres, t: TriDiagModule, rho: FormMatrix, side: int) -> dict[int, Matrix]:
    """Per degree: kernel of the comparison on one spinor companion family."""
    fam = t.m10 if side == 1 else t.m01
    out = {}
    for d, model in fam.items():
        e = (d + 1, d) if side == 1 else (d, d + 1)
        img = induced_h(rep.g, 0, e).column_space_basis()
        pre = preimage_basis(induced_h(rho, 0, e), img)
        classes = [model.proj @ c for c in pre.columns()]
        basis = span_basis(rep.field, classes, model.dim)
        if basis.cols:
            out[d] = basis
    return out


def _extract_monad(monad: MonadPresentation) -> Extraction:
    mm = module_from_bundle(monad)
    pres = minimal_presentation(mm.module)
    t = sigma_modules(pres)
    if mm.module.is_zero:
        empty = FormMatrix.zero(monad.field, (), monad.B)
        return Extraction(HorrocksTriple(pres, t, {}, {}), mm, empty, empty)
    rho = _rho_from_generators(pres, mm, monad.B)
    lam = solve_form_system(monad.psi, rho.compose(pres.psi))
    w = _transported_images(monad, pres, t, rho, side=1)
    v = _transported_images(monad, pres, t, rho, side=2)
    triple = HorrocksTriple(pres, t, w, v).validate()
    return Extraction(triple, mm, rho, lam)


def _transported_images(monad: MonadPresentation, pres, t: TriDiagModule, rho: FormMatrix, side: int) -> dict[int, Matrix]:
    """Images of the differential's H1 classes, moved to canonical coordinates.

    The classes live in the coker models of ker(psi); the comparison map is
    an isomorphism on each companion piece, so solving against its matrix
    carries them back to the models of the canonical presentation.
    """
    fld = monad.field
    out = {}
    degrees = []
    for k in monad.K:
        gap = k[0] - k[1]
        if side == 1 and gap == 1:
            degrees.append(-1 - k[0])
        elif side == 2 and gap == -1:
            degrees.append(-1 - k[1])
    fam = t.m10 if side == 1 else t.m01
    for d in sorted(set(degrees)):
        e = (d + 1, d) if side == 1 else (d, d + 1)
        span = image_h1_split(monad.kappa, monad.fbar, side, d)
        if span.cols == 0:
            continue
        if d not in fam:
            raise InternalInvariantViolation(f"classes found outside the companion support at degree {d}")
        model = fam[d]
        fmodel = monad.fbar.h1_model(e)
        tau = fmodel.proj @ (induced_h(rho, 0, e) @ model.reps)
        if tau.rows != tau.cols or tau.rank() != tau.rows:
            raise InternalInvariantViolation("comparison map is not an isomorphism on a companion piece")
        coords = tau.solve_matrix(span)
        out[d] = span_basis(fld, list(coords.columns()), model.dim)
    return out


# ---------------------------------------------------------------------------
# synthesis


def synthesize(triple: HorrocksTriple, rng=None) -> MonadPresentation:
    """A bundle with the given invariants, as a monad K -> L1 + L' -> L0.

    Steps: find sections of the spinor-twisted associated bundle whose
    connecting classes equal the requested basis vectors (solvable exactly
    because the vectors are socle classes); stack them as a differential
    out of spinor-inverse twists; append free rows until the dual map is
    onto on all sections (decided by the exact generation-degree bound);
    return the verified monad.
    """
    triple.validate()
    pres = triple.pres
    fld = triple.module.field
    psi = pres.psi
    k_twists: list[Twist] = []
    theta_cols: list[np.ndarray] = []
    col_shifts: list[Twist] = []
    for side, sub in ((1, triple.V), (2, triple.W)):
        # V pairs with O(1,0)-inverse columns, W with O(0,1)-inverse columns
        for m in sorted(sub):
            basis = sub[m]
            if basis.cols == 0:
                continue
            dpl = -1 - m
            j = 2 if side == 2 else 1
            sections, delta = delta_matrix(pres.F, j, dpl)
            try:
                coeff = delta.solve_matrix(basis)
            except NoSolution as exc:
                raise LiftFailed(f"no section hits the requested class at degree {m}") from exc
            secs = sections @ coeff
            for c in range(secs.cols):
                k_twists.append((dpl, dpl - 1) if j == 2 else (dpl - 1, dpl))
                col_shifts.append((-dpl, -dpl + 1) if j == 2 else (-dpl + 1, -dpl))
                theta_cols.append(secs.col(c))
    if not k_twists:
        kappa = FormMatrix.zero(fld, (), pres.L1)
        monad = MonadPresentation(kappa, psi, verify=False)
        _verify_synthesis(monad, triple)
        return monad
    col_mats = []
    for k, e, vec in zip(k_twists, col_shifts, theta_cols):
        forms = _forms_from_vector(fld, pres.L1, e, vec)
        col_mats.append(FormMatrix(fld, (k,), pres.L1, tuple((f,) for f in forms)))
    theta = form_hstack(col_mats)
    rows = _free_closure_rows(theta)
    kappa = form_vstack([theta, rows]) if rows.dst else theta
    psibar = form_hstack([psi, FormMatrix.zero(fld, rows.dst, pres.L0)]) if rows.dst else psi
    monad = MonadPresentation(kappa, psibar, verify=False)
    if not monad.fiberwise_injective(rng):
        raise VerificationFailed("synthesised differential drops rank at a sampled point")
    _verify_synthesis(monad, triple)
    return monad


def _free_closure_rows(theta: FormMatrix) -> FormMatrix:
    """Free rows making the dual of the differential onto on all sections.

    The section module of the dual of K is generated between the first and
    last degrees where its summands acquire sections, so it suffices to close
    the cokernel on that degree range: at each degree the missing cosets lift
    to rows into a free line bundle, and once a degree is fully covered its
    multiples cover everything the next degree inherits.
    """
    fld = theta.field
    dual = theta.dual()  # L1^v -> K^v
    firsts = [max(k) for k in theta.src]
    fmin, fmax = min(firsts), max(firsts)
    out_rows: list[tuple[int, np.ndarray]] = []
    for f in range(fmin, fmax + 1):
        amb = split_dim(0, dual.dst, (f, f))
        killed = list(induced_h(dual, 0, (f, f)).columns())
        if f > fmin:
            # the previous degree is fully covered, so its image under the
            # four coordinate multiplications joins the killed span
            for name in ("x0", "x1", "x2", "x3"):
                mul = h0_mult_on_split(dual.dst, BiForm.variable(fld, name), (f - 1, f - 1))
                killed.extend(list(mul.columns()))
        reps, _proj = quotient_data(fld, amb, killed)
        for vec in reps.columns():
            out_rows.append((f, vec))
    src = theta.src
    row_mats = []
    for g, vec in out_rows:
        forms = _forms_from_vector(fld, tuple((-a, -b) for a, b in src), (g, g), vec)
        row_mats.append(FormMatrix(fld, src, ((g, g),), (tuple(forms),)))
    rows = form_vstack(row_mats) if row_mats else FormMatrix.zero(fld, src, ())
    stacked = form_hstack([dual, rows.dual()]) if row_mats else dual
    for f in range(fmin, fmax + 1):
        m = induced_h(stacked, 0, (f, f))
        if m.rows - m.rank() != 0:
            raise InternalInvariantViolation("free closure failed to cover the dual cokernel")
    return rows


def _verify_synthesis(monad: MonadPresentation, triple: HorrocksTriple):
    mm = module_from_bundle(monad)
    want = {d: triple.module.dim(d) for d in triple.module.support()}
    got = {d: mm.module.dim(d) for d in mm.module.support()}
    if want != got:
        raise VerificationFailed(f"synthesised module has dimensions {got}, wanted {want}")


# ---------------------------------------------------------------------------
# comparison of triples


@dataclass
class TripleIsoWitness:
    maps: dict[int, Matrix]
    phi0: FormMatrix
    phi1: FormMatrix
    trials_used: int


def triple_iso(t1: HorrocksTriple, t2: HorrocksTriple, trials: int = 200, rng=None):
    """A module isomorphism matching both subspaces, or None after the trials.

    The maps commuting with the operators form a linear space, and so does
    its subspace of maps whose induced action carries W into W' and V into
    V' (the induced action on each companion piece is linear in the map).
    The search solves for that subspace exactly and then samples it for an
    element invertible in every degree, so only invertibility is randomised.
    None is a negative search report, not a proof of non-isomorphism.
    """
    m1, m2 = t1.module, t2.module
    if {d: m1.dim(d) for d in m1.support()} != {d: m2.dim(d) for d in m2.support()}:
        return None
    if any(t1.w_dim(d) != t2.w_dim(d) for d in set(t1.W) | set(t2.W)):
        return None
    if any(t1.v_dim(d) != t2.v_dim(d) for d in set(t1.V) | set(t2.V)):
        return None
    if m1.is_zero:
        empty = FormMatrix.zero(t1.module.field, (), ())
        return TripleIsoWitness({}, empty, empty, 0)
    rng = rng or random.Random(101)
    fld = m1.field
    basis, layout = _commuting_space(m1, m2)
    if not basis:
        return None
    admissible = _subspace_constrained_basis(t1, t2, basis, layout)
    if not admissible:
        return None
    for trial in range(1, trials + 1):
        vec = fld.zeros(len(basis[0]), 1)[:, 0]
        for b in admissible:
            vec = fld.reduce(vec + b * fld.random_scalar(rng))
        maps = _vec_to_maps(fld, vec, layout)
        if not all(maps[d].rank() == m1.dim(d) for d in m1.support()):
            continue
        witness = _try_lift_and_match(t1, t2, maps)
        if witness is not None:
            phi0, phi1 = witness
            return TripleIsoWitness(maps, phi0, phi1, trial)
    return None


def _phi0_from_maps(t1: HorrocksTriple, t2: HorrocksTriple, maps: dict[int, Matrix]) -> FormMatrix | None:
    """Chain-map head L0 -> L0' covering the given degreewise module maps.

    Generator columns are lifted through the target surjection; the lift is
    linear in the maps because the particular solution of a fixed matrix is.
    """
    fld = t1.module.field
    gens = minimal_generators(t1.module)
    cols = []
    src = []
    for d in sorted(gens):
        reps, _ = gens[d]
        for gvec in reps.columns():
            target = maps[d] @ gvec
            try:
                x = t2.pres.pi_at(d).solve(target)
            except NoSolution:
                return None
            cols.append(_forms_from_vector(fld, t2.pres.L0, (d, d), x))
            src.append((-d, -d))
    rows = tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(len(t2.pres.L0)))
    return FormMatrix(fld, tuple(src), tuple(t2.pres.L0), rows)


def _subspace_constrained_basis(t1, t2, basis, layout):
    """Basis of commuting maps whose induced action maps W1 into W2, V1 into V2."""
    fld = t1.module.field
    constraint_cols = []
    for b in basis:
        maps = _vec_to_maps(fld, b, layout)
        phi0 = _phi0_from_maps(t1, t2, maps)
        entries = []
        for side in (1, 2):
            fam1 = t1.T.m10 if side == 1 else t1.T.m01
            fam2 = t2.T.m10 if side == 1 else t2.T.m01
            sub1 = t1.W if side == 1 else t1.V
            sub2 = t2.W if side == 1 else t2.V
            for d in sorted(sub1):
                if sub1[d].cols == 0:
                    continue
                if d not in fam2 or d not in fam1:
                    return []
                e = (d + 1, d) if side == 1 else (d, d + 1)
                induced = fam2[d].proj @ (induced_h(phi0, 0, e) @ fam1[d].reps)
                image = induced @ sub1[d]
                b2 = sub2.get(d)
                _, kill = quotient_data(fld, fam2[d].dim, list(b2.columns()) if b2 is not None else [])
                entries.append((kill @ image).a.reshape(-1))
        if entries:
            constraint_cols.append(np.concatenate(entries))
        else:
            constraint_cols.append(fld.zeros(0, 1)[:, 0])
    if constraint_cols and constraint_cols[0].shape[0]:
        cmat = Matrix.from_columns(fld, constraint_cols)
        coeffs = cmat.kernel_basis()
    else:
        coeffs = list(Matrix.identity(fld, len(basis)).columns())
    out = []
    for c in coeffs:
        vec = fld.zeros(len(basis[0]), 1)[:, 0]
        for i, b in enumerate(basis):
            if c[i] != 0:
                vec = fld.reduce(vec + b * c[i])
        out.append(vec)
    return out


def _try_lift_and_match(t1: HorrocksTriple, t2: HorrocksTriple, maps: dict[int, Matrix]):
    fld = t1.module.field
    phi0 = _phi0_from_maps(t1, t2, maps)
    if phi0 is None:
        return None
    try:
        phi1 = solve_form_system(t2.pres.psi, phi0.compose(t1.pres.psi))
    except NoSolution:
        return None
    for side in (1, 2):
        fam1 = t1.T.m10 if side == 1 else t1.T.m01
        fam2 = t2.T.m10 if side == 1 else t2.T.m01
        sub1 = t1.W if side == 1 else t1.V
        sub2 = t2.W if side == 1 else t2.V
        for d in sorted(set(fam1) | set(fam2)):
            e = (d + 1, d) if side == 1 else (d, d + 1)
            dim1 = fam1[d].dim if d in fam1 else 0
            dim2 = fam2[d].dim if d in fam2 else 0
            if dim1 != dim2:
                return None
            if dim1 == 0:
                continue
            induced = fam2[d].proj @ (induced_h(phi0, 0, e) @ fam1[d].reps)
            if induced.rank() != dim1:
                return None
            b1 = sub1.get(d)
            b2 = sub2.get(d)
            n1 = b1.cols if b1 is not None else 0
            n2 = b2.cols if b2 is not None else 0
            if n1 != n2:
                return None
            if n1 == 0:
                continue
            if not subspace_equal(induced @ b1, b2):
                return None
    return phi0, phi1


# ---------------------------------------------------------------------------
# four-term exactness and the round trip


def four_term_check(rep: KerPresentation, extraction: Extraction) -> dict:
    """Alternating dimension sums of the comparison sequence, per side and degree.

    For each spinor side the sequence  K-part -> companion -> H1(E twisted)
    -> H1(middle twisted)  must be exact, so the alternating sum of
    dimensions vanishes degreewise.  Raises on the first violation.
    """
    t = extraction.triple.T
    out = {}
    twist_vals = [x for tw in (list(rep.A) + list(rep.B)) for x in tw]
    rep_lo = -max(twist_vals) - 2
    rep_hi = -min(twist_vals) + 2
    for side in (1, 2):
        fam = t.m10 if side == 1 else t.m01
        sub = extraction.triple.W if side == 1 else extraction.triple.V
        degrees = sorted(set(fam) | set(sub))
        lo = min(degrees + [rep_lo])
        hi = max(degrees + [rep_hi])
        for d in range(lo, hi + 1):
            e = (d + 1, d) if side == 1 else (d, d + 1)
            kdim = sub[d].cols if d in sub else 0
            mdim = fam[d].dim if d in fam else 0
            edim = rep.h1_dim(e)
            adim = split_dim(1, rep.A, e)
            total = kdim - mdim + edim - adim
            out[(side, d)] = (kdim, mdim, edim, adim)
            if total != 0:
                raise ExactnessViolation(f"side {side}, degree {d}: {kdim} - {mdim} + {edim} - {adim} != 0")
    return out


def monad_has_acm_summand(monad: MonadPresentation) -> bool:
    """Conservative split test for monads.

    Zero Hom in either direction certifies a twist off the summand list;
    when both Hom spaces are nonzero the composition pairing is evaluated on
    the representatives carried by the middle term, which detects every
    split the middle term can see.
    """
    if monad.rank <= 0:
        return False
    dual = MonadPresentation(monad.psi.dual(), monad.kappa.dual(), verify=False)
    twists = list(monad.A) + list(monad.K)
    lo = min(min(t) for t in twists)
    hi = max(max(t) for t in twists)
    for x in range(lo, hi + 1):
        for y in range(lo, hi + 1):
            if abs(x - y) > 1:
                continue
            l = (x, y)
            n1 = monad.h0_dim((-x, -y))
            if n1 == 0:
                continue
            n2 = dual.h0_dim(l)
            if n2 == 0:
                continue
            if _monad_pairing_nonzero(monad, l):
                return True
    return False


def _monad_pairing_nonzero(monad: MonadPresentation, l: Twist) -> bool:
    fld = monad.field
    cols = monad.fbar.h0_space((-l[0], -l[1]))
    rows_ker = induced_h(monad.kappa.dual(), 0, l).kernel_matrix()
    if cols.cols == 0 or rows_ker.cols == 0:
        return False
    for ci in range(cols.cols):
        cform = _forms_from_vector(fld, monad.A, (-l[0], -l[1]), cols.col(ci))
        for ri in range(rows_ker.cols):
            rform = _forms_from_vector(fld, tuple((-a, -b) for a, b in monad.A), (l[0], l[1]), rows_ker.col(ri))
            total = fld.scalar(0)
            for f, g in zip(cform, rform):
                prod = f * g
                total = fld.scalar(total + prod.constant_value())
            if total != 0:
                return True
    return False


@dataclass
class RoundtripReport:
    ok: bool
    monad: MonadPresentation
    extracted: "Extraction"
    witness: TripleIsoWitness | None
    notes: list[str]


def roundtrip(triple: HorrocksTriple, trials: int = 200, rng=None) -> RoundtripReport:
    """synthesize -> summand check -> extract -> compare against the input."""
    rng = rng or random.Random(7)
    notes = []
    monad = synthesize(triple, rng=rng)
    notes.append(f"monad K={list(monad.K)} middle={list(monad.A)}")
    if monad_has_acm_summand(monad):
        return RoundtripReport(False, monad, None, None, notes + ["ACM summand detected after synthesis"])
    extraction = extract_invariants(monad)
    notes.append(f"extracted {extraction.triple.summary()}")
    witness = triple_iso(triple, extraction.triple, trials=trials, rng=rng)
    ok = witness is not None
    if not ok:
        notes.append("no isomorphism of triples found")
    return RoundtripReport(ok, monad, extraction, witness, notes)
