//! Optics over the finite cartesian base.
//!
//! An [`Optic`] is one representative `(M, u : S → M⊗A, v : M⊗B → T)` of a
//! coend class. Over a cartesian base each class is determined by its
//! [`Lens`] `(get, put)`, which is how classes are compared.

use std::fmt;

use crate::error::{Error, Result};
use crate::map::{
    compose, count_maps, enumerate_maps_capped, whisker_left, whisker_right, FinMap,
    DEFAULT_ENUMERATION_CAP,
};
use crate::object::{pair, unpair, TensorObj};

/// Boundary data of `Optic((A,B),(S,T))`: hole `A → B`, outside `S → T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpticShape {
    pub inner_left: TensorObj,
    pub inner_right: TensorObj,
    pub outer_left: TensorObj,
    pub outer_right: TensorObj,
}

impl OpticShape {
    /// Shape `(A,B) → (S,T)`.
    pub fn new(a: TensorObj, b: TensorObj, s: TensorObj, t: TensorObj) -> Self {
        OpticShape {
            inner_left: a,
            inner_right: b,
            outer_left: s,
            outer_right: t,
        }
    }

    fn ensure_eq(&self, other: &OpticShape, context: &str) -> Result<()> {
        if self != other {
            return Err(Error::boundary(context, self, other));
        }
        Ok(())
    }
}

impl fmt::Display for OpticShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{}) -> ({},{})",
            self.inner_left, self.inner_right, self.outer_left, self.outer_right
        )
    }
}

/// Which side of a [`SlideSpan`] to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Push `w` into the forward map: `((w⊗A)∘u, v)`.
    Left,
    /// Pull `w` into the backward map: `(u, v∘(w⊗B))`.
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optic {
    shape: OpticShape,
    residual: TensorObj,
    fwd: FinMap,
    bwd: FinMap,
}

impl Optic {
    pub fn new(shape: OpticShape, residual: TensorObj, fwd: FinMap, bwd: FinMap) -> Result<Self> {
        let fwd_cod = residual.tensor(&shape.inner_left);
        if fwd.dom() != &shape.outer_left || fwd.cod() != &fwd_cod {
            return Err(Error::boundary(
                "optic forward map",
                format!("{} -> {}", shape.outer_left, fwd_cod),
                format!("{} -> {}", fwd.dom(), fwd.cod()),
            ));
        }
        let bwd_dom = residual.tensor(&shape.inner_right);
        if bwd.dom() != &bwd_dom || bwd.cod() != &shape.outer_right {
            return Err(Error::boundary(
                "optic backward map",
                format!("{} -> {}", bwd_dom, shape.outer_right),
                format!("{} -> {}", bwd.dom(), bwd.cod()),
            ));
        }
        Ok(Optic {
            shape,
            residual,
            fwd,
            bwd,
        })
    }

    /// The empty frame on `(A,B)`: residual `I`, both maps identities.
    pub fn identity(a: &TensorObj, b: &TensorObj) -> Self {
        Optic {
            shape: OpticShape::new(a.clone(), b.clone(), a.clone(), b.clone()),
            residual: TensorObj::unit(),
            fwd: FinMap::identity(a),
            bwd: FinMap::identity(b),
        }
    }

    pub fn shape(&self) -> &OpticShape {
        &self.shape
    }

    pub fn residual(&self) -> &TensorObj {
        &self.residual
    }

    pub fn fwd(&self) -> &FinMap {
        &self.fwd
    }

    pub fn bwd(&self) -> &FinMap {
        &self.bwd
    }

    /// `v ∘ (M⊗f) ∘ u`.
    pub fn fill(&self, f: &FinMap) -> Result<FinMap> {
        if f.dom() != &self.shape.inner_left || f.cod() != &self.shape.inner_right {
            return Err(Error::boundary(
                "filler",
                format!("{} -> {}", self.shape.inner_left, self.shape.inner_right),
                format!("{} -> {}", f.dom(), f.cod()),
            ));
        }
        let a = self.shape.inner_left.size();
        let b = self.shape.inner_right.size();
        Ok(FinMap::from_fn(
            self.shape.outer_left.clone(),
            self.shape.outer_right.clone(),
            |s| {
                let (m, x) = unpair(self.fwd.apply(s), a);
                self.bwd.apply(pair(m, f.apply(x), b))
            },
        ))
    }

    /// The lens normal form of this representative's class.
    pub fn to_lens(&self) -> Lens {
        let a = self.shape.inner_left.size();
        let b = self.shape.inner_right.size();
        let s = &self.shape.outer_left;
        let get = FinMap::from_fn(s.clone(), self.shape.inner_left.clone(), |x| {
            self.fwd.apply(x) % a
        });
        let put = FinMap::from_fn(
            s.tensor(&self.shape.inner_right),
            self.shape.outer_right.clone(),
            |z| {
                let (x, y) = unpair(z, b);
                let m = self.fwd.apply(x) / a;
                self.bwd.apply(pair(m, y, b))
            },
        );
        Lens {
            shape: self.shape.clone(),
            get,
            put,
        }
    }

    /// Renames the residual along a bijection `w : M → N`:
    /// `((w⊗A)∘u, v∘(w⁻¹⊗B))`. The class is unchanged.
    pub fn relabel(&self, w: &FinMap) -> Result<Optic> {
        if w.dom() != &self.residual {
            return Err(Error::boundary("relabel", &self.residual, w.dom()));
        }
        let n = w.cod().size();
        let mut inverse = vec![usize::MAX; n];
        for x in w.dom().elements() {
            let y = w.apply(x);
            if inverse[y] != usize::MAX {
                return Err(Error::InvalidTable(
                    "relabelling map is not injective".into(),
                ));
            }
            inverse[y] = x;
        }
        if inverse.contains(&usize::MAX) {
            return Err(Error::InvalidTable(
                "relabelling map is not surjective".into(),
            ));
        }
        let w_inv = FinMap::new(w.cod().clone(), w.dom().clone(), inverse)?;
        SlideSpan::new(
            self.shape.clone(),
            self.fwd.clone(),
            compose(&self.bwd, &whisker_right(&w_inv, &self.shape.inner_right))?,
            w.clone(),
        )
        .map(|span| span.slide(Side::Left))
    }

    /// Replaces `fwd` by `fwd ∘ p` for `p : S' → S`.
    pub fn outer_precompose(&self, p: &FinMap) -> Result<Optic> {
        let fwd = compose(&self.fwd, p)?;
        let mut shape = self.shape.clone();
        shape.outer_left = p.dom().clone();
        Ok(Optic {
            shape,
            residual: self.residual.clone(),
            fwd,
            bwd: self.bwd.clone(),
        })
    }

    /// Replaces `bwd` by `q ∘ bwd` for `q : T → T'`.
    pub fn outer_postcompose(&self, q: &FinMap) -> Result<Optic> {
        let bwd = compose(q, &self.bwd)?;
        let mut shape = self.shape.clone();
        shape.outer_right = q.cod().clone();
        Ok(Optic {
            shape,
            residual: self.residual.clone(),
            fwd: self.fwd.clone(),
            bwd,
        })
    }
}

impl AsRef<Optic> for Optic {
    fn as_ref(&self) -> &Optic {
        self
    }
}

/// An unmatched pair `u : S → M⊗A`, `v : N⊗B → T` with `w : M → N`.
///
/// Its two sides `((w⊗A)∘u, v)` and `(u, v∘(w⊗B))` are the generating
/// instances of the coend relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlideSpan {
    shape: OpticShape,
    fwd: FinMap,
    bwd: FinMap,
    w: FinMap,
}

impl SlideSpan {
    pub fn new(shape: OpticShape, fwd: FinMap, bwd: FinMap, w: FinMap) -> Result<Self> {
        // both sides must be well-formed optics
        let span = SlideSpan { shape, fwd, bwd, w };
        Optic::new(
            span.shape.clone(),
            span.w.dom().clone(),
            span.fwd.clone(),
            compose(&span.bwd, &whisker_right(&span.w, &span.shape.inner_right))?,
        )?;
        Optic::new(
            span.shape.clone(),
            span.w.cod().clone(),
            compose(&whisker_right(&span.w, &span.shape.inner_left), &span.fwd)?,
            span.bwd.clone(),
        )?;
        Ok(span)
    }

    /// `Side::Left` gives `((w⊗A)∘u, v)` with residual `N`; `Side::Right`
    /// gives `(u, v∘(w⊗B))` with residual `M`.
    pub fn slide(&self, side: Side) -> Optic {
        match side {
            Side::Left => Optic {
                shape: self.shape.clone(),
                residual: self.w.cod().clone(),
                fwd: compose(&whisker_right(&self.w, &self.shape.inner_left), &self.fwd)
                    .expect("checked in SlideSpan::new"),
                bwd: self.bwd.clone(),
            },
            Side::Right => Optic {
                shape: self.shape.clone(),
                residual: self.w.dom().clone(),
                fwd: self.fwd.clone(),
                bwd: compose(&self.bwd, &whisker_right(&self.w, &self.shape.inner_right))
                    .expect("checked in SlideSpan::new"),
            },
        }
    }
}

/// Equality of coend classes.
pub fn optic_eq(o1: &Optic, o2: &Optic) -> Result<bool> {
    o1.shape.ensure_eq(&o2.shape, "optic comparison")?;
    Ok(o1.to_lens() == o2.to_lens())
}

/// `p ∘ o`: `o` fills the hole of `p`.
pub fn seq_compose(p: &Optic, o: &Optic) -> Result<Optic> {
    if p.shape.inner_left != o.shape.outer_left || p.shape.inner_right != o.shape.outer_right {
        return Err(Error::boundary(
            "sequential composition",
            format!("outer ({},{})", p.shape.inner_left, p.shape.inner_right),
            format!("outer ({},{})", o.shape.outer_left, o.shape.outer_right),
        ));
    }
    let fwd = compose(&whisker_left(&p.residual, &o.fwd), &p.fwd)?;
    let bwd = compose(&p.bwd, &whisker_left(&p.residual, &o.bwd))?;
    Ok(Optic {
        shape: OpticShape::new(
            o.shape.inner_left.clone(),
            o.shape.inner_right.clone(),
            p.shape.outer_left.clone(),
            p.shape.outer_right.clone(),
        ),
        residual: p.residual.tensor(&o.residual),
        fwd,
        bwd,
    })
}

/// Tambara strength: whisker `o` by `W` on both outer boundaries.
pub fn tensor_strength(o: &Optic, w: &TensorObj) -> Optic {
    // With flat factor lists (w,(m,a)) and ((w,m),a) share an index, so
    // the structural shuffle is the identity on tables.
    Optic {
        shape: OpticShape::new(
            o.shape.inner_left.clone(),
            o.shape.inner_right.clone(),
            w.tensor(&o.shape.outer_left),
            w.tensor(&o.shape.outer_right),
        ),
        residual: w.tensor(&o.residual),
        fwd: whisker_left(w, &o.fwd),
        bwd: whisker_left(w, &o.bwd),
    }
}

/// Canonical `(get : S → A, put : S⊗B → T)` form of a cartesian optic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lens {
    shape: OpticShape,
    get: FinMap,
    put: FinMap,
}

impl Lens {
    pub fn new(shape: OpticShape, get: FinMap, put: FinMap) -> Result<Self> {
        if get.dom() != &shape.outer_left || get.cod() != &shape.inner_left {
            return Err(Error::boundary(
                "lens get",
                format!("{} -> {}", shape.outer_left, shape.inner_left),
                format!("{} -> {}", get.dom(), get.cod()),
            ));
        }
        let put_dom = shape.outer_left.tensor(&shape.inner_right);
        if put.dom() != &put_dom || put.cod() != &shape.outer_right {
            return Err(Error::boundary(
                "lens put",
                format!("{} -> {}", put_dom, shape.outer_right),
                format!("{} -> {}", put.dom(), put.cod()),
            ));
        }
        Ok(Lens { shape, get, put })
    }

    pub fn shape(&self) -> &OpticShape {
        &self.shape
    }

    pub fn get(&self) -> &FinMap {
        &self.get
    }

    pub fn put(&self) -> &FinMap {
        &self.put
    }

    /// The representative with residual `S`: `s ↦ (s, get s)`, `(s,b) ↦ put(s,b)`.
    pub fn to_optic(&self) -> Optic {
        let s = &self.shape.outer_left;
        let a = self.shape.inner_left.size();
        Optic {
            shape: self.shape.clone(),
            residual: s.clone(),
            fwd: FinMap::from_fn(s.clone(), s.tensor(&self.shape.inner_left), |x| {
                pair(x, self.get.apply(x), a)
            }),
            bwd: self.put.clone(),
        }
    }

    /// Number of lenses of a shape, `|A|^|S| · |T|^(|S||B|)`.
    pub fn count(shape: &OpticShape) -> Option<u128> {
        let gets = count_maps(&shape.outer_left, &shape.inner_left)?;
        let puts = count_maps(
            &shape.outer_left.tensor(&shape.inner_right),
            &shape.outer_right,
        )?;
        gets.checked_mul(puts)
    }

    /// Position in [`Lens::enumerate`] order.
    pub fn rank(&self) -> u128 {
        let puts = count_maps(self.put.dom(), self.put.cod()).expect("rank of huge lens space");
        self.get.rank() * puts + self.put.rank()
    }

    pub fn from_rank(shape: &OpticShape, rank: u128) -> Lens {
        let put_dom = shape.outer_left.tensor(&shape.inner_right);
        let puts = count_maps(&put_dom, &shape.outer_right).expect("rank of huge lens space");
        Lens {
            shape: shape.clone(),
            get: FinMap::from_rank(&shape.outer_left, &shape.inner_left, rank / puts),
            put: FinMap::from_rank(&put_dom, &shape.outer_right, rank % puts),
        }
    }

    /// Every lens of the shape, i.e. one representative per coend class.
    pub fn enumerate(shape: &OpticShape) -> Result<impl Iterator<Item = Lens>> {
        let count = Lens::count(shape).unwrap_or(u128::MAX);
        if count > DEFAULT_ENUMERATION_CAP {
            return Err(Error::EnumerationTooLarge {
                count,
                cap: DEFAULT_ENUMERATION_CAP,
            });
        }
        // validate the factors against the cap as well
        enumerate_maps_capped(
            &shape.outer_left,
            &shape.inner_left,
            DEFAULT_ENUMERATION_CAP,
        )?;
        let shape = shape.clone();
        Ok((0..count).map(move |r| Lens::from_rank(&shape, r)))
    }

    /// `get` and `put` tables as `x -> y` lines.
    pub fn render(&self) -> String {
        let mut out = String::from("get:\n");
        for line in self.get.render_table() {
            out.push_str("  ");
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str("put:\n");
        for line in self.put.render_table() {
            out.push_str("  ");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// First entry at which two lenses of the same shape disagree.
pub fn lens_difference(l1: &Lens, l2: &Lens) -> Option<String> {
    if l1.shape != l2.shape {
        return Some(format!("shapes differ: {} vs {}", l1.shape, l2.shape));
    }
    let s = &l1.shape.outer_left;
    for x in s.elements() {
        let (g1, g2) = (l1.get.apply(x), l2.get.apply(x));
        if g1 != g2 {
            let a = &l1.shape.inner_left;
            return Some(format!(
                "get at {}: {} vs {}",
                s.render(x),
                a.render(g1),
                a.render(g2)
            ));
        }
    }
    let dom = l1.put.dom();
    for z in dom.elements() {
        let (p1, p2) = (l1.put.apply(z), l2.put.apply(z));
        if p1 != p2 {
            let t = &l1.shape.outer_right;
            return Some(format!(
                "put at {}: {} vs {}",
                dom.render(z),
                t.render(p1),
                t.render(p2)
            ));
        }
    }
    None
}
