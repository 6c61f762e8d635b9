//! The escrow action `⋊` on optics into `(A,C)` and the partial Vermittler
//! map `◁`.
//!
//! Orientation: `h ∈ ⟨C A⟩` has `h₁ : C → M⊗A`; the collateral optic `f`
//! has `f₁ : B → N⊗A`, `f₂ : N⊗C → B`; a Vermittler optic has shape
//! `Optic((A,C),(C⊗B, A⊗B))` and a hole `A → C`.

use std::fmt;

use crate::algebra::{check_module, check_monoid, ComoduleStr, ModuleStr, MonoidStr};
use crate::error::{Error, Result};
use crate::escrow::{escrow_shape, Escrow};
use crate::map::{tensor_map, FinMap};
use crate::object::{pair, unpair, Elem, TensorObj};
use crate::optic::{lens_difference, Optic, OpticShape};

/// `B` as a `C`-module and an `A`-comodule at once.
#[derive(Clone, Debug)]
pub struct VermittlerCtx {
    module: ModuleStr,
    comodule: ComoduleStr,
}

impl VermittlerCtx {
    pub fn new(module: ModuleStr, comodule: ComoduleStr) -> Result<Self> {
        if module.carrier() != comodule.carrier() {
            return Err(Error::boundary(
                "module and comodule carriers",
                module.carrier(),
                comodule.carrier(),
            ));
        }
        if let Some(v) = check_monoid(module.monoid()).first() {
            return Err(Error::InvalidStructure(format!("monoid: {v}")));
        }
        if let Some(v) = check_module(&module).first() {
            return Err(Error::InvalidStructure(format!("module: {v}")));
        }
        Ok(VermittlerCtx { module, comodule })
    }

    /// The comonoid `A`.
    pub fn a(&self) -> &TensorObj {
        self.comodule.comonoid().carrier()
    }

    /// The monoid `C`.
    pub fn c(&self) -> &TensorObj {
        self.module.monoid().carrier()
    }

    /// The intermediary `B`.
    pub fn b(&self) -> &TensorObj {
        self.module.carrier()
    }

    pub fn monoid(&self) -> &MonoidStr {
        self.module.monoid()
    }

    pub fn module(&self) -> &ModuleStr {
        &self.module
    }

    pub fn comodule(&self) -> &ComoduleStr {
        &self.comodule
    }

    /// Shape of the optics acted on by `⋊`: `(B,B) → (A,C)`.
    pub fn acted_shape(&self) -> OpticShape {
        OpticShape::new(
            self.b().clone(),
            self.b().clone(),
            self.a().clone(),
            self.c().clone(),
        )
    }

    /// Shape of collateral combs `(A,C) → (B,B)`.
    pub fn collateral_shape(&self) -> OpticShape {
        OpticShape::new(
            self.a().clone(),
            self.c().clone(),
            self.b().clone(),
            self.b().clone(),
        )
    }

    pub fn vermittler_shape(&self) -> OpticShape {
        OpticShape::new(
            self.a().clone(),
            self.c().clone(),
            self.c().tensor(self.b()),
            self.a().tensor(self.b()),
        )
    }
}

fn ensure_shape(o: &Optic, want: OpticShape, what: &str) -> Result<()> {
    if o.shape() != &want {
        return Err(Error::boundary(what, want, o.shape()));
    }
    Ok(())
}

/// `h ⋊ o` for `h ∈ ⟨A C⟩` and `o : (B,B) → (A,C)`.
///
/// Residual `M⊗N`; forward `a ↦ ((m,n), x.b)` with `h₁(a) = (m,x)`,
/// `o₁(a) = (n,b)`; backward `((m,n),b) ↦ h₂(m, attr b) * o₂(n,b)`.
pub fn escrow_act(ctx: &VermittlerCtx, h: &Escrow, o: &Optic) -> Result<Optic> {
    ensure_shape(h.optic(), escrow_shape(ctx.a(), ctx.c()), "acting escrow")?;
    ensure_shape(o, ctx.acted_shape(), "acted optic")?;
    let (a_obj, b_obj, c_obj) = (ctx.a(), ctx.b(), ctx.c());
    let (as_, bs, cs) = (a_obj.size(), b_obj.size(), c_obj.size());
    let (mh, no) = (h.residual(), o.residual());
    let ns = no.size();
    let residual = mh.tensor(no);
    let c = ctx.monoid();
    let fwd = FinMap::from_fn(a_obj.clone(), residual.tensor(b_obj), |a| {
        let (m, x) = unpair(h.lock().apply(a), cs);
        let (n, b) = unpair(o.fwd().apply(a), bs);
        pair(pair(m, n, ns), ctx.module.act(x, b), bs)
    });
    let bwd = FinMap::from_fn(residual.tensor(b_obj), c_obj.clone(), |z| {
        let (mn, b) = unpair(z, bs);
        let (m, n) = unpair(mn, ns);
        let from_h = h.unlock().apply(pair(m, ctx.comodule.attr(b), as_));
        c.mult(from_h, o.bwd().apply(pair(n, b, bs)))
    });
    Optic::new(ctx.acted_shape(), residual, fwd, bwd)
}

/// An optic of shape `Optic((A,C),(C⊗B, A⊗B))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vermittler(Optic);

impl Vermittler {
    pub fn optic(&self) -> &Optic {
        &self.0
    }

    pub fn into_optic(self) -> Optic {
        self.0
    }
}

/// `α̃(h)`: the escrow `h ∈ ⟨C A⟩` beside an idle `B` wire.
pub fn alpha_tilde(ctx: &VermittlerCtx, h: &Escrow) -> Result<Vermittler> {
    ensure_shape(
        h.optic(),
        escrow_shape(ctx.c(), ctx.a()),
        "escrow for alpha",
    )?;
    let (as_, bs, cs) = (ctx.a().size(), ctx.b().size(), ctx.c().size());
    let m_obj = h.residual();
    let residual = m_obj.tensor(ctx.b());
    let fwd = FinMap::from_fn(ctx.c().tensor(ctx.b()), residual.tensor(ctx.a()), |z| {
        let (x, b) = unpair(z, bs);
        let (m, y) = unpair(h.lock().apply(x), as_);
        pair(pair(m, b, bs), y, as_)
    });
    let bwd = FinMap::from_fn(residual.tensor(ctx.c()), ctx.a().tensor(ctx.b()), |z| {
        let (mb, x2) = unpair(z, cs);
        let (m, b) = unpair(mb, bs);
        pair(h.unlock().apply(pair(m, x2, cs)), b, bs)
    });
    Optic::new(ctx.vermittler_shape(), residual, fwd, bwd).map(Vermittler)
}

/// `β̃(f)`: the collateral comb `f` with the action plugged in front and
/// the coaction behind.
pub fn beta_tilde(ctx: &VermittlerCtx, f: &Optic) -> Result<Vermittler> {
    ensure_shape(f, ctx.collateral_shape(), "collateral optic")?;
    let bs = ctx.b().size();
    let fwd = FinMap::from_fn(ctx.c().tensor(ctx.b()), f.fwd().cod().clone(), |z| {
        let (x, b) = unpair(z, bs);
        f.fwd().apply(ctx.module.act(x, b))
    });
    let bwd = FinMap::from_fn(f.bwd().dom().clone(), ctx.a().tensor(ctx.b()), |z| {
        let b2 = f.bwd().apply(z);
        pair(ctx.comodule.attr(b2), b2, bs)
    });
    Optic::new(ctx.vermittler_shape(), f.residual().clone(), fwd, bwd).map(Vermittler)
}

/// `h ◁ f`, defined exactly when `α̃(h)` and `β̃(f)` have the same lens.
pub fn vermittler_act(ctx: &VermittlerCtx, h: &Escrow, f: &Optic) -> Result<Vermittler> {
    let alpha = alpha_tilde(ctx, h)?;
    let beta = beta_tilde(ctx, f)?;
    match lens_difference(&alpha.0.to_lens(), &beta.0.to_lens()) {
        None => Ok(alpha),
        Some(diff) => Err(Error::Undefined(format!(
            "alpha(h) and beta(f) differ: {diff}"
        ))),
    }
}

/// `ε ∘ v ∘ η`: precompose with `η⊗B : B → C⊗B`, postcompose with
/// `ε⊗B : A⊗B → B`. Whenever `v = h ◁ f` this is `f` again.
pub fn unit_counit_restriction(ctx: &VermittlerCtx, v: &Vermittler) -> Result<Optic> {
    let b_id = FinMap::identity(ctx.b());
    let eta = tensor_map(&ctx.monoid().unit_map(), &b_id);
    let eps = tensor_map(&crate::map::discard(ctx.a()), &b_id);
    v.0.outer_precompose(&eta)?.outer_postcompose(&eps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillLawViolation {
    /// `[x]` for the single-action instance, `[x1, x2]` for the product one.
    pub scalars: Vec<Elem>,
    pub b: Elem,
    pub expected: Elem,
    pub got: Elem,
}

impl fmt::Display for FillLawViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "fill law fails at scalars {:?}, b = {}: expected {}, got {}",
            self.scalars, self.b, self.expected, self.got
        )
    }
}

/// Checks, for a filler `g : A → C`, that for all `x, x1, x2 ∈ C`, `b ∈ B`:
/// `fill(v,g)(x,b) = (attr b₂, b₂)` with `b₂ = fill(f,g)(x.b)`, and
/// `fill(v,g)(x1*x2, b) = (attr b₃, b₃)` with `b₃ = fill(f,g)(x1.(x2.b))`.
pub fn vermittler_fill_law(
    ctx: &VermittlerCtx,
    v: &Vermittler,
    f: &Optic,
    g: &FinMap,
) -> Result<Vec<FillLawViolation>> {
    let fv = v.0.fill(g)?;
    let ff = f.fill(g)?;
    let bs = ctx.b().size();
    let module = &ctx.module;
    let coact = |b2: Elem| pair(ctx.comodule.attr(b2), b2, bs);
    let mut out = Vec::new();
    for x in ctx.c().elements() {
        for b in ctx.b().elements() {
            let expected = coact(ff.apply(module.act(x, b)));
            let got = fv.apply(pair(x, b, bs));
            if got != expected {
                out.push(FillLawViolation {
                    scalars: vec![x],
                    b,
                    expected,
                    got,
                });
            }
        }
    }
    for x1 in ctx.c().elements() {
        for x2 in ctx.c().elements() {
            let x = ctx.monoid().mult(x1, x2);
            for b in ctx.b().elements() {
                let expected = coact(ff.apply(module.act(x1, module.act(x2, b))));
                let got = fv.apply(pair(x, b, bs));
                if got != expected {
                    out.push(FillLawViolation {
                        scalars: vec![x1, x2],
                        b,
                        expected,
                        got,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_comodule, ComonoidStr};
    use crate::escrow::{emon_product, emon_unit, EscrowMonoidCtx};
    use crate::map::enumerate_maps;
    use crate::object::AtomObj;
    use crate::optic::optic_eq;

    fn obj(name: &str, n: usize) -> TensorObj {
        AtomObj::range(name, n).into()
    }

    /// A = {*}, C = B = Z3 acting by addition, attr = const *.
    fn z3_ctx() -> VermittlerCtx {
        let z3 = MonoidStr::cyclic(3);
        let b = z3.carrier().clone();
        let module = ModuleStr::new(z3.clone(), b.clone(), z3.mult_map().clone()).unwrap();
        let a = obj("A", 1);
        let comodule = make_comodule(
            ComonoidStr::new(a.clone()),
            b.clone(),
            FinMap::constant(&b, &a, 0),
        )
        .unwrap();
        VermittlerCtx::new(module, comodule).unwrap()
    }

    #[test]
    fn act_example_from_definition() {
        let ctx = z3_ctx();
        let (a, c) = (ctx.a().clone(), ctx.c().clone());
        let h = Escrow::pure(&FinMap::constant(&a, &c, 1), &FinMap::constant(&a, &c, 2)).unwrap();
        for b0 in 0..3 {
            let o = Optic::new(
                ctx.acted_shape(),
                TensorObj::unit(),
                FinMap::constant(&a, ctx.b(), b0),
                FinMap::identity(ctx.b()),
            )
            .unwrap();
            let l = escrow_act(&ctx, &h, &o).unwrap().to_lens();
            assert_eq!(l.get().table(), &[(b0 + 1) % 3]);
            assert_eq!(l.put().table(), &[2, 0, 1]);
        }
    }

    #[test]
    fn act_unit_and_product() {
        let ctx = z3_ctx();
        let ectx =
            EscrowMonoidCtx::new(ComonoidStr::new(ctx.a().clone()), ctx.monoid().clone()).unwrap();
        let (a, c, b) = (ctx.a().clone(), ctx.c().clone(), ctx.b().clone());
        let o = Optic::new(
            ctx.acted_shape(),
            b.clone(),
            FinMap::new(a.clone(), b.tensor(&b), vec![5]).unwrap(),
            FinMap::new(b.tensor(&b), c.clone(), vec![0, 1, 1, 2, 0, 0, 1, 2, 2]).unwrap(),
        )
        .unwrap();
        assert!(optic_eq(&escrow_act(&ctx, &emon_unit(&ectx), &o).unwrap(), &o).unwrap());
        let h = Escrow::pure(&FinMap::constant(&a, &c, 2), &FinMap::constant(&a, &c, 1)).unwrap();
        let k = Escrow::pure(&FinMap::constant(&a, &c, 1), &FinMap::constant(&a, &c, 1)).unwrap();
        let lhs = escrow_act(&ctx, &emon_product(&ectx, &k, &h).unwrap(), &o).unwrap();
        let rhs = escrow_act(&ctx, &k, &escrow_act(&ctx, &h, &o).unwrap()).unwrap();
        assert!(optic_eq(&lhs, &rhs).unwrap());
    }

    /// B = {•}, a₀ fixed; C = Z_n trivially acting.
    fn singleton_ctx(a_size: usize, c: MonoidStr, a0: Elem) -> VermittlerCtx {
        let b = obj("B", 1);
        let a = obj("A", a_size);
        let module = ModuleStr::trivial(c, b.clone());
        let comodule = make_comodule(
            ComonoidStr::new(a.clone()),
            b.clone(),
            FinMap::constant(&b, &a, a0),
        )
        .unwrap();
        VermittlerCtx::new(module, comodule).unwrap()
    }

    fn singleton_f(ctx: &VermittlerCtx, a0: Elem) -> Optic {
        Optic::new(
            ctx.collateral_shape(),
            TensorObj::unit(),
            FinMap::constant(ctx.b(), ctx.a(), a0),
            FinMap::constant(ctx.c(), ctx.b(), 0),
        )
        .unwrap()
    }

    #[test]
    fn beta_on_singleton() {
        let ctx = singleton_ctx(2, MonoidStr::cyclic(2), 1);
        let l = beta_tilde(&ctx, &singleton_f(&ctx, 1))
            .unwrap()
            .optic()
            .to_lens();
        assert!(l.get().table().iter().all(|&v| v == 1));
        // (a0, •) has index a0 in A⊗B with |B| = 1
        assert!(l.put().table().iter().all(|&v| v == 1));
    }

    #[test]
    fn alpha_tables() {
        let ctx = z3_ctx();
        let (a, c) = (ctx.a().clone(), ctx.c().clone());
        let h = Escrow::from_maps(
            &c,
            &a,
            TensorObj::unit(),
            FinMap::constant(&c, &a, 0),
            FinMap::constant(&c, &a, 0),
        )
        .unwrap();
        let al = alpha_tilde(&ctx, &h).unwrap().optic().to_lens();
        let hl = h.optic().to_lens();
        let bs = ctx.b().size();
        for z in ctx.c().tensor(ctx.b()).elements() {
            let (x, b) = unpair(z, bs);
            assert_eq!(al.get().apply(z), hl.get().apply(x));
            for x2 in ctx.c().elements() {
                let want = pair(hl.put().apply(pair(x, x2, 3)), b, bs);
                assert_eq!(al.put().apply(pair(z, x2, 3)), want);
            }
        }
    }

    #[test]
    fn defined_on_matching_singleton() {
        let ctx = singleton_ctx(2, MonoidStr::cyclic(2), 1);
        let f = singleton_f(&ctx, 1);
        let (a, c) = (ctx.a().clone(), ctx.c().clone());
        let h = Escrow::from_maps(
            &c,
            &a,
            TensorObj::unit(),
            FinMap::constant(&c, &a, 1),
            FinMap::constant(&c, &a, 1),
        )
        .unwrap();
        let v = vermittler_act(&ctx, &h, &f).unwrap();
        assert_eq!(v, alpha_tilde(&ctx, &h).unwrap());
        assert!(optic_eq(&unit_counit_restriction(&ctx, &v).unwrap(), &f).unwrap());
        for g in enumerate_maps(&a, &c).unwrap() {
            assert!(vermittler_fill_law(&ctx, &v, &f, &g).unwrap().is_empty());
        }
    }

    #[test]
    fn undefined_on_non_constant_get() {
        let ctx = singleton_ctx(2, MonoidStr::cyclic(2), 1);
        let f = singleton_f(&ctx, 1);
        let (a, c) = (ctx.a().clone(), ctx.c().clone());
        let h = Escrow::from_maps(
            &c,
            &a,
            TensorObj::unit(),
            FinMap::from_fn(c.clone(), a.clone(), |x| x),
            FinMap::constant(&c, &a, 1),
        )
        .unwrap();
        match vermittler_act(&ctx, &h, &f) {
            Err(Error::Undefined(msg)) => assert!(msg.contains("get at"), "{msg}"),
            other => panic!("expected Undefined, got {other:?}"),
        }
    }

    #[test]
    fn trivial_action_ignores_scalar() {
        let ctx = singleton_ctx(2, MonoidStr::cyclic(3), 0);
        let f = singleton_f(&ctx, 0);
        let l = beta_tilde(&ctx, &f).unwrap().optic().to_lens();
        let first = l.get().apply(0);
        assert!(l.get().table().iter().all(|&v| v == first));
    }

    #[test]
    fn xor_fill_law_on_memory_comb() {
        // C = Z2 acting on B = Z2 by xor, attr = id, f memory-style
        let z2 = MonoidStr::cyclic(2);
        let b = z2.carrier().clone();
        let a = obj("A", 2);
        let module = ModuleStr::new(z2.clone(), b.clone(), z2.mult_map().clone()).unwrap();
        let attr = FinMap::from_fn(b.clone(), a.clone(), |x| x);
        let comodule = make_comodule(ComonoidStr::new(a.clone()), b.clone(), attr).unwrap();
        let ctx = VermittlerCtx::new(module, comodule).unwrap();
        let f = Optic::new(
            ctx.collateral_shape(),
            b.clone(),
            FinMap::from_fn(b.clone(), b.tensor(&a), |x| pair(x, x, 2)),
            FinMap::from_fn(b.tensor(ctx.c()), b.clone(), |z| z / 2),
        )
        .unwrap();
        let v = beta_tilde(&ctx, &f).unwrap();
        let mut fillers = 0;
        for g in enumerate_maps(&a, ctx.c()).unwrap() {
            assert!(vermittler_fill_law(&ctx, &v, &f, &g).unwrap().is_empty());
            fillers += 1;
        }
        assert_eq!(fillers, 4);
    }

    #[test]
    fn ctx_rejects_invalid_module() {
        let z2 = MonoidStr::cyclic(2);
        let b = obj("B", 2);
        let action = FinMap::new(z2.carrier().tensor(&b), b.clone(), vec![1, 0, 0, 1]).unwrap();
        let module = ModuleStr::new(z2, b.clone(), action).unwrap();
        let a = obj("A", 1);
        let comodule = make_comodule(
            ComonoidStr::new(a.clone()),
            b.clone(),
            FinMap::constant(&b, &a, 0),
        )
        .unwrap();
        assert!(VermittlerCtx::new(module, comodule).is_err());
    }
}
