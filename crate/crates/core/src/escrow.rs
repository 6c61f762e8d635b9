//! Escrows `⟨X Y⟩ = Optic((Y,X),(X,Y))`, their diamond composition and the
//! escrow monoid on `⟨A C⟩`.
//!
//! The forward map of an escrow locks: `X → M⊗Y`. The backward map unlocks:
//! `M⊗X → Y`. The hole `Y → X` is the delivery witness.

use crate::algebra::{check_monoid, ComonoidStr, MonoidStr};
use crate::error::{Error, Result};
use crate::map::{compose, symmetry, whisker_left, whisker_right, FinMap};
use crate::object::{pair, unpair, TensorObj};
use crate::optic::{Optic, OpticShape};

/// Shape of `⟨X Y⟩`.
pub fn escrow_shape(x: &TensorObj, y: &TensorObj) -> OpticShape {
    OpticShape::new(y.clone(), x.clone(), x.clone(), y.clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Escrow(Optic);

impl Escrow {
    pub fn new(optic: Optic) -> Result<Self> {
        let s = optic.shape();
        if s.inner_left != s.outer_right || s.inner_right != s.outer_left {
            return Err(Error::boundary(
                "escrow shape",
                escrow_shape(&s.outer_left, &s.outer_right),
                s,
            ));
        }
        Ok(Escrow(optic))
    }

    /// Escrow `⟨X Y⟩` from a lock `X → M⊗Y` and an unlock `M⊗X → Y`.
    pub fn from_maps(
        x: &TensorObj,
        y: &TensorObj,
        residual: TensorObj,
        lock: FinMap,
        unlock: FinMap,
    ) -> Result<Self> {
        Optic::new(escrow_shape(x, y), residual, lock, unlock).map(Escrow)
    }

    /// Residual-free escrow: `lock(x) = ((), p(x))`, `unlock((), x) = q(x)`.
    pub fn pure(p: &FinMap, q: &FinMap) -> Result<Self> {
        if p.dom() != q.dom() || p.cod() != q.cod() {
            return Err(Error::boundary(
                "pure escrow",
                format!("{} -> {}", p.dom(), p.cod()),
                format!("{} -> {}", q.dom(), q.cod()),
            ));
        }
        Self::from_maps(p.dom(), p.cod(), TensorObj::unit(), p.clone(), q.clone())
    }

    /// The paying side `X`.
    pub fn left(&self) -> &TensorObj {
        &self.0.shape().outer_left
    }

    /// The receiving side `Y`.
    pub fn right(&self) -> &TensorObj {
        &self.0.shape().outer_right
    }

    pub fn residual(&self) -> &TensorObj {
        self.0.residual()
    }

    pub fn lock(&self) -> &FinMap {
        self.0.fwd()
    }

    pub fn unlock(&self) -> &FinMap {
        self.0.bwd()
    }

    pub fn optic(&self) -> &Optic {
        &self.0
    }

    pub fn into_optic(self) -> Optic {
        self.0
    }
}

impl AsRef<Optic> for Escrow {
    fn as_ref(&self) -> &Optic {
        &self.0
    }
}

/// The unit escrow `ν_S`: residual `I`, both maps identities.
pub fn nu(s: &TensorObj) -> Escrow {
    Escrow(Optic::identity(s, s))
}

/// `k ⋄ h` for `k ∈ ⟨U T⟩`, `h ∈ ⟨T S⟩`, giving `⟨U S⟩`.
///
/// Residual `N⊗M`; lock `(N⊗h₁)∘k₁`; unlock `h₂∘(M⊗k₂)∘(σ_{N,M}⊗U)`.
pub fn diamond(k: &Escrow, h: &Escrow) -> Result<Escrow> {
    diamond_impl(k, h, true)
}

/// [`diamond`] without the residual twist. Only exists so the law harness
/// can prove it catches a broken composition.
#[doc(hidden)]
pub fn diamond_untwisted(k: &Escrow, h: &Escrow) -> Result<Escrow> {
    diamond_impl(k, h, false)
}

fn diamond_impl(k: &Escrow, h: &Escrow, twist: bool) -> Result<Escrow> {
    if k.right() != h.left() {
        return Err(Error::boundary(
            "diamond: shared party",
            k.right(),
            h.left(),
        ));
    }
    let u = k.left();
    let s = h.right();
    let n = k.residual();
    let m = h.residual();
    let lock = compose(&whisker_left(n, h.lock()), k.lock())?;
    let mk = compose(h.unlock(), &whisker_left(m, k.unlock()))?;
    let unlock = if twist {
        compose(&mk, &whisker_right(&symmetry(n, m), u))?
    } else {
        // reads an index of N⊗M⊗U as one of M⊗N⊗U
        FinMap::new(n.tensor(m).tensor(u), s.clone(), mk.table().to_vec())?
    };
    Escrow::from_maps(u, s, n.tensor(m), lock, unlock)
}

/// Hypotheses of the escrow monoid on `⟨A C⟩`.
#[derive(Clone, Debug)]
pub struct EscrowMonoidCtx {
    comonoid: ComonoidStr,
    monoid: MonoidStr,
}

impl EscrowMonoidCtx {
    pub fn new(comonoid: ComonoidStr, monoid: MonoidStr) -> Result<Self> {
        let v = check_monoid(&monoid);
        if let Some(first) = v.first() {
            return Err(Error::InvalidStructure(format!(
                "{} is not a monoid: {first}",
                monoid.carrier()
            )));
        }
        Ok(EscrowMonoidCtx { comonoid, monoid })
    }

    pub fn comonoid(&self) -> &ComonoidStr {
        &self.comonoid
    }

    pub fn monoid(&self) -> &MonoidStr {
        &self.monoid
    }

    pub fn shape(&self) -> OpticShape {
        escrow_shape(self.comonoid.carrier(), self.monoid.carrier())
    }

    fn check(&self, e: &Escrow, what: &str) -> Result<()> {
        let want = self.shape();
        if e.optic().shape() != &want {
            return Err(Error::boundary(what, want, e.optic().shape()));
        }
        Ok(())
    }
}

/// The unit escrow of `⟨A C⟩`: lock `a ↦ ((), e)`, unlock `((), a) ↦ e`.
pub fn emon_unit(ctx: &EscrowMonoidCtx) -> Escrow {
    let a = ctx.comonoid.carrier();
    let c = ctx.monoid.carrier();
    let e = ctx.monoid.unit();
    Escrow(
        Optic::new(
            ctx.shape(),
            TensorObj::unit(),
            FinMap::constant(a, c, e),
            FinMap::constant(a, c, e),
        )
        .expect("unit escrow shape"),
    )
}

/// `h ⊗ k` in the escrow monoid.
///
/// Residual `M⊗N`; lock `a ↦ ((m,n), x*y)` where `h₁(a) = (m,x)`,
/// `k₁(a) = (n,y)`; unlock `((m,n),a) ↦ h₂(m,a) * k₂(n,a)`.
pub fn emon_product(ctx: &EscrowMonoidCtx, h: &Escrow, k: &Escrow) -> Result<Escrow> {
    ctx.check(h, "escrow monoid left operand")?;
    ctx.check(k, "escrow monoid right operand")?;
    let c = &ctx.monoid;
    let a_obj = ctx.comonoid.carrier();
    let (as_, cs) = (a_obj.size(), c.carrier().size());
    let (mh, mk) = (h.residual(), k.residual());
    let ns = mk.size();
    let residual = mh.tensor(mk);
    let lock = FinMap::from_fn(a_obj.clone(), residual.tensor(c.carrier()), |a| {
        let (m, x) = unpair(h.lock().apply(a), cs);
        let (n, y) = unpair(k.lock().apply(a), cs);
        pair(pair(m, n, ns), c.mult(x, y), cs)
    });
    let unlock = FinMap::from_fn(residual.tensor(a_obj), c.carrier().clone(), |z| {
        let (mn, a) = unpair(z, as_);
        let (m, n) = unpair(mn, ns);
        c.mult(
            h.unlock().apply(pair(m, a, as_)),
            k.unlock().apply(pair(n, a, as_)),
        )
    });
    Escrow::from_maps(a_obj, c.carrier(), residual, lock, unlock)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::convolve;
    use crate::map::enumerate_maps;
    use crate::object::AtomObj;
    use crate::optic::optic_eq;

    fn x2() -> TensorObj {
        AtomObj::range("X", 2).into()
    }

    fn neg(x: &TensorObj) -> FinMap {
        FinMap::from_fn(x.clone(), x.clone(), |v| 1 - v)
    }

    fn memory(x: &TensorObj) -> Escrow {
        let n = x.size();
        let lock = FinMap::from_fn(x.clone(), x.tensor(x), |v| pair(v, v, n));
        let unlock = FinMap::from_fn(x.tensor(x), x.clone(), |z| z / n);
        Escrow::from_maps(x, x, x.clone(), lock, unlock).unwrap()
    }

    #[test]
    fn nu_fills_to_filler() {
        let x = x2();
        let l = nu(&x).optic().to_lens();
        assert_eq!(l.get(), &FinMap::identity(&x));
        assert_eq!(l.put().table(), &[0, 1, 0, 1]);
        assert_eq!(nu(&x).optic().fill(&neg(&x)).unwrap(), neg(&x));
        assert_eq!(
            nu(&x).optic().fill(&FinMap::identity(&x)).unwrap(),
            FinMap::identity(&x)
        );
        let i = TensorObj::unit();
        assert_eq!(nu(&i).optic().to_lens().put().table(), &[0]);
    }

    #[test]
    fn diamond_units() {
        let x = x2();
        let m = memory(&x);
        assert!(optic_eq(diamond(&m, &nu(&x)).unwrap().optic(), m.optic()).unwrap());
        assert!(optic_eq(diamond(&nu(&x), &m).unwrap().optic(), m.optic()).unwrap());
    }

    #[test]
    fn diamond_of_memories() {
        let x = x2();
        let d = diamond(&memory(&x), &memory(&x)).unwrap();
        assert!(optic_eq(d.optic(), memory(&x).optic()).unwrap());
        let l = d.optic().to_lens();
        assert_eq!(l.get(), &FinMap::identity(&x));
        assert_eq!(l.put().table(), &[0, 0, 1, 1]);
    }

    #[test]
    fn diamond_of_negations_is_nu() {
        let x = x2();
        let e = Escrow::pure(&neg(&x), &neg(&x)).unwrap();
        let d = diamond(&e, &e).unwrap();
        assert!(optic_eq(d.optic(), nu(&x).optic()).unwrap());
    }

    #[test]
    fn diamond_fill_law() {
        // fill(k⋄h, g)(u) = h₂(m, k₂(n, g(s)))
        let x = x2();
        let k = Escrow::from_maps(
            &x,
            &x,
            x.clone(),
            FinMap::new(x.clone(), x.tensor(&x), vec![1, 2]).unwrap(),
            FinMap::new(x.tensor(&x), x.clone(), vec![0, 1, 1, 1]).unwrap(),
        )
        .unwrap();
        let h = Escrow::from_maps(
            &x,
            &x,
            x.clone(),
            FinMap::new(x.clone(), x.tensor(&x), vec![3, 0]).unwrap(),
            FinMap::new(x.tensor(&x), x.clone(), vec![1, 0, 0, 1]).unwrap(),
        )
        .unwrap();
        let d = diamond(&k, &h).unwrap();
        for g in enumerate_maps(&x, &x).unwrap() {
            let filled = d.optic().fill(&g).unwrap();
            for u in x.elements() {
                let (n, t) = unpair(k.lock().apply(u), 2);
                let (m, s) = unpair(h.lock().apply(t), 2);
                let t2 = k.unlock().apply(pair(n, g.apply(s), 2));
                let want = h.unlock().apply(pair(m, t2, 2));
                assert_eq!(filled.apply(u), want);
            }
        }
    }

    #[test]
    fn diamond_party_mismatch() {
        let x = x2();
        let y: TensorObj = AtomObj::range("Y", 2).into();
        assert!(diamond(&nu(&x), &nu(&y)).is_err());
    }

    fn z3_ctx(a: usize) -> EscrowMonoidCtx {
        EscrowMonoidCtx::new(
            ComonoidStr::new(AtomObj::range("A", a).into()),
            MonoidStr::cyclic(3),
        )
        .unwrap()
    }

    #[test]
    fn emon_unit_tables() {
        let ctx = z3_ctx(2);
        let i = emon_unit(&ctx);
        assert_eq!(i.lock().table(), &[0, 0]);
        let l = i.optic().to_lens();
        assert!(l.get().table().iter().all(|&v| v == 0));
        assert!(l.put().table().iter().all(|&v| v == 0));
        let c = ctx.monoid().carrier().clone();
        let a = ctx.comonoid().carrier().clone();
        for g in enumerate_maps(&c, &a).unwrap() {
            assert_eq!(i.optic().fill(&g).unwrap(), FinMap::constant(&a, &c, 0));
        }
    }

    #[test]
    fn emon_product_with_unit() {
        let ctx = z3_ctx(2);
        let a = ctx.comonoid().carrier().clone();
        let c = ctx.monoid().carrier().clone();
        let h = Escrow::from_maps(
            &a,
            &c,
            a.clone(),
            FinMap::new(a.clone(), a.tensor(&c), vec![2, 3]).unwrap(),
            FinMap::new(a.tensor(&a), c.clone(), vec![0, 1, 2, 2]).unwrap(),
        )
        .unwrap();
        let i = emon_unit(&ctx);
        assert!(optic_eq(emon_product(&ctx, &h, &i).unwrap().optic(), h.optic()).unwrap());
        assert!(optic_eq(emon_product(&ctx, &i, &h).unwrap().optic(), h.optic()).unwrap());
    }

    #[test]
    fn emon_pure_forward_value() {
        let ctx = z3_ctx(2);
        let a = ctx.comonoid().carrier().clone();
        let c = ctx.monoid().carrier().clone();
        let p = FinMap::new(a.clone(), c.clone(), vec![0, 1]).unwrap();
        let p2 = FinMap::constant(&a, &c, 1);
        let prod = emon_product(
            &ctx,
            &Escrow::pure(&p, &p).unwrap(),
            &Escrow::pure(&p2, &p2).unwrap(),
        )
        .unwrap();
        assert_eq!(prod.lock().apply(1), 2);
        let conv = convolve(&p, &p2, ctx.comonoid(), ctx.monoid()).unwrap();
        let pure = Escrow::pure(&conv, &conv).unwrap();
        assert!(optic_eq(prod.optic(), pure.optic()).unwrap());
    }

    #[test]
    fn emon_ctx_rejects_bad_monoid() {
        let c: TensorObj = AtomObj::range("C", 2).into();
        let mult = FinMap::new(c.tensor(&c), c.clone(), vec![1, 1, 1, 0]).unwrap();
        let bad = MonoidStr::new(c.clone(), mult, 0).unwrap();
        assert!(EscrowMonoidCtx::new(ComonoidStr::new(c), bad).is_err());
    }
}
