//! Monoids, the diagonal comonoid, modules and comodules over finite sets.

use std::fmt;

use crate::error::{Error, Result};
use crate::map::{compose, diagonal, tensor_map, FinMap};
use crate::object::{pair, AtomObj, Elem, TensorObj};

/// A monoid `(C, m, e)` in the base category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidStr {
    carrier: TensorObj,
    mult: FinMap,
    unit: Elem,
}

impl MonoidStr {
    /// Checks shapes only; the laws are checked by [`check_monoid`].
    pub fn new(carrier: TensorObj, mult: FinMap, unit: Elem) -> Result<Self> {
        if carrier.size() == 0 {
            return Err(Error::InvalidStructure(format!(
                "monoid carrier {carrier} is empty"
            )));
        }
        let sq = carrier.tensor(&carrier);
        if mult.dom() != &sq || mult.cod() != &carrier {
            return Err(Error::boundary(
                "monoid multiplication",
                format!("{sq} -> {carrier}"),
                format!("{} -> {}", mult.dom(), mult.cod()),
            ));
        }
        if unit >= carrier.size() {
            return Err(Error::InvalidStructure(format!(
                "monoid unit index {unit} outside {carrier}"
            )));
        }
        Ok(MonoidStr {
            carrier,
            mult,
            unit,
        })
    }

    /// `Z_n` under addition mod `n`, on a set named `Z{n}`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "Z_0 is not a monoid");
        let carrier: TensorObj = AtomObj::range(format!("Z{n}"), n).into();
        let mult = FinMap::from_fn(carrier.tensor(&carrier), carrier.clone(), |z| {
            (z / n + z % n) % n
        });
        MonoidStr {
            carrier,
            mult,
            unit: 0,
        }
    }

    pub fn carrier(&self) -> &TensorObj {
        &self.carrier
    }

    pub fn mult_map(&self) -> &FinMap {
        &self.mult
    }

    pub fn unit(&self) -> Elem {
        self.unit
    }

    #[inline]
    pub fn mult(&self, x: Elem, y: Elem) -> Elem {
        self.mult.apply(pair(x, y, self.carrier.size()))
    }

    /// The unit as a map `I → C`.
    pub fn unit_map(&self) -> FinMap {
        FinMap::constant(&TensorObj::unit(), &self.carrier, self.unit)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonoidViolation {
    LeftUnit { x: Elem, got: Elem },
    RightUnit { x: Elem, got: Elem },
    Associativity { x: Elem, y: Elem, z: Elem },
}

impl fmt::Display for MonoidViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonoidViolation::LeftUnit { x, got } => {
                write!(f, "left unit law fails at {x}: e*x = {got}")
            }
            MonoidViolation::RightUnit { x, got } => {
                write!(f, "right unit law fails at {x}: x*e = {got}")
            }
            MonoidViolation::Associativity { x, y, z } => {
                write!(f, "associativity fails at ({x},{y},{z})")
            }
        }
    }
}

/// Every violated instance of the unit and associativity laws.
pub fn check_monoid(m: &MonoidStr) -> Vec<MonoidViolation> {
    let mut out = Vec::new();
    let e = m.unit;
    for x in m.carrier.elements() {
        let l = m.mult(e, x);
        if l != x {
            out.push(MonoidViolation::LeftUnit { x, got: l });
        }
        let r = m.mult(x, e);
        if r != x {
            out.push(MonoidViolation::RightUnit { x, got: r });
        }
    }
    for x in m.carrier.elements() {
        for y in m.carrier.elements() {
            let xy = m.mult(x, y);
            for z in m.carrier.elements() {
                if m.mult(xy, z) != m.mult(x, m.mult(y, z)) {
                    out.push(MonoidViolation::Associativity { x, y, z });
                }
            }
        }
    }
    out
}

/// A comonoid in the cartesian model: always the diagonal with discard.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComonoidStr {
    carrier: TensorObj,
}

impl ComonoidStr {
    pub fn new(carrier: TensorObj) -> Self {
        ComonoidStr { carrier }
    }

    pub fn carrier(&self) -> &TensorObj {
        &self.carrier
    }

    pub fn comult(&self) -> FinMap {
        diagonal(&self.carrier)
    }

    pub fn counit(&self) -> FinMap {
        crate::map::discard(&self.carrier)
    }
}

/// A left module `a : C ⊗ B → B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleStr {
    monoid: MonoidStr,
    carrier: TensorObj,
    action: FinMap,
}

impl ModuleStr {
    pub fn new(monoid: MonoidStr, carrier: TensorObj, action: FinMap) -> Result<Self> {
        let dom = monoid.carrier.tensor(&carrier);
        if action.dom() != &dom || action.cod() != &carrier {
            return Err(Error::boundary(
                "module action",
                format!("{dom} -> {carrier}"),
                format!("{} -> {}", action.dom(), action.cod()),
            ));
        }
        Ok(ModuleStr {
            monoid,
            carrier,
            action,
        })
    }

    /// `x.b = b` for every `x`.
    pub fn trivial(monoid: MonoidStr, carrier: TensorObj) -> Self {
        let bs = carrier.size();
        let action = FinMap::from_fn(monoid.carrier.tensor(&carrier), carrier.clone(), |z| z % bs);
        ModuleStr {
            monoid,
            carrier,
            action,
        }
    }

    pub fn monoid(&self) -> &MonoidStr {
        &self.monoid
    }

    pub fn carrier(&self) -> &TensorObj {
        &self.carrier
    }

    pub fn action_map(&self) -> &FinMap {
        &self.action
    }

    #[inline]
    pub fn act(&self, x: Elem, b: Elem) -> Elem {
        self.action.apply(pair(x, b, self.carrier.size()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleViolation {
    Unit { b: Elem, got: Elem },
    Associativity { x: Elem, y: Elem, b: Elem },
}

impl fmt::Display for ModuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleViolation::Unit { b, got } => write!(f, "unit law fails at {b}: e.b = {got}"),
            ModuleViolation::Associativity { x, y, b } => {
                write!(f, "action associativity fails at ({x},{y},{b})")
            }
        }
    }
}

/// Every violated instance of the two module laws.
pub fn check_module(m: &ModuleStr) -> Vec<ModuleViolation> {
    let mut out = Vec::new();
    let c = &m.monoid;
    for b in m.carrier.elements() {
        let got = m.act(c.unit, b);
        if got != b {
            out.push(ModuleViolation::Unit { b, got });
        }
    }
    for x in c.carrier.elements() {
        for y in c.carrier.elements() {
            let xy = c.mult(x, y);
            for b in m.carrier.elements() {
                if m.act(xy, b) != m.act(x, m.act(y, b)) {
                    out.push(ModuleViolation::Associativity { x, y, b });
                }
            }
        }
    }
    out
}

/// A comodule over the diagonal comonoid, given by `attr : B → A`; the
/// coaction is `b ↦ (b, attr(b))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComoduleStr {
    comonoid: ComonoidStr,
    carrier: TensorObj,
    attr: FinMap,
}

pub fn make_comodule(
    comonoid: ComonoidStr,
    carrier: TensorObj,
    attr: FinMap,
) -> Result<ComoduleStr> {
    if attr.dom() != &carrier || attr.cod() != comonoid.carrier() {
        return Err(Error::boundary(
            "comodule attribute map",
            format!("{carrier} -> {}", comonoid.carrier()),
            format!("{} -> {}", attr.dom(), attr.cod()),
        ));
    }
    Ok(ComoduleStr {
        comonoid,
        carrier,
        attr,
    })
}

impl ComoduleStr {
    pub fn comonoid(&self) -> &ComonoidStr {
        &self.comonoid
    }

    pub fn carrier(&self) -> &TensorObj {
        &self.carrier
    }

    pub fn attr_map(&self) -> &FinMap {
        &self.attr
    }

    #[inline]
    pub fn attr(&self, b: Elem) -> Elem {
        self.attr.apply(b)
    }

    /// `c : B → B ⊗ A`.
    pub fn coaction(&self) -> FinMap {
        let a = self.comonoid.carrier().size();
        FinMap::from_fn(
            self.carrier.clone(),
            self.carrier.tensor(self.comonoid.carrier()),
            |b| pair(b, self.attr.apply(b), a),
        )
    }
}

/// `m ∘ (f ⊗ g) ∘ Δ`, i.e. `x ↦ f(x) * g(x)`.
pub fn convolve(f: &FinMap, g: &FinMap, a: &ComonoidStr, c: &MonoidStr) -> Result<FinMap> {
    for h in [f, g] {
        if h.dom() != a.carrier() || h.cod() != c.carrier() {
            return Err(Error::boundary(
                "convolution operand",
                format!("{} -> {}", a.carrier(), c.carrier()),
                format!("{} -> {}", h.dom(), h.cod()),
            ));
        }
    }
    let fg = tensor_map(f, g);
    compose(c.mult_map(), &compose(&fg, &a.comult())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::enumerate_maps;

    fn b2() -> TensorObj {
        AtomObj::range("B", 2).into()
    }

    #[test]
    fn known_monoids_are_valid() {
        assert!(check_monoid(&MonoidStr::cyclic(3)).is_empty());
        assert!(check_monoid(&MonoidStr::cyclic(2)).is_empty());
    }

    #[test]
    fn broken_unit_is_reported() {
        let c = b2();
        // mult(0,0)=1, otherwise xor
        let mult = FinMap::new(c.tensor(&c), c.clone(), vec![1, 1, 1, 0]).unwrap();
        let m = MonoidStr::new(c, mult, 0).unwrap();
        let v = check_monoid(&m);
        assert!(v.contains(&MonoidViolation::LeftUnit { x: 0, got: 1 }));
        assert!(v.contains(&MonoidViolation::RightUnit { x: 0, got: 1 }));
    }

    #[test]
    fn empty_carrier_rejected() {
        let e: TensorObj = AtomObj::range("E", 0).into();
        let mult = FinMap::new(e.tensor(&e), e.clone(), vec![]).unwrap();
        assert!(MonoidStr::new(e, mult, 0).is_err());
    }

    #[test]
    fn regular_and_trivial_modules() {
        let z3 = MonoidStr::cyclic(3);
        let regular =
            ModuleStr::new(z3.clone(), z3.carrier().clone(), z3.mult_map().clone()).unwrap();
        assert!(check_module(&regular).is_empty());
        assert!(check_module(&ModuleStr::trivial(z3, b2())).is_empty());
    }

    #[test]
    fn bad_unit_action() {
        let z2 = MonoidStr::cyclic(2);
        let b = b2();
        // action(0,b) = 1-b, action(1,b) = b
        let action = FinMap::new(z2.carrier().tensor(&b), b.clone(), vec![1, 0, 0, 1]).unwrap();
        let m = ModuleStr::new(z2, b, action).unwrap();
        let v = check_module(&m);
        assert!(v.iter().any(|e| matches!(e, ModuleViolation::Unit { .. })));
    }

    /// Brute-force evaluation of the two diagrams, composed as maps.
    fn module_diagrams_commute(m: &ModuleStr) -> bool {
        let c = m.monoid();
        let b = m.carrier();
        let unit_side = compose(
            m.action_map(),
            &tensor_map(&c.unit_map(), &FinMap::identity(b)),
        )
        .unwrap();
        let left = compose(
            m.action_map(),
            &tensor_map(c.mult_map(), &FinMap::identity(b)),
        )
        .unwrap();
        let right = compose(
            m.action_map(),
            &tensor_map(&FinMap::identity(c.carrier()), m.action_map()),
        )
        .unwrap();
        unit_side == FinMap::identity(b) && left == right
    }

    #[test]
    fn check_module_matches_diagrams() {
        for c in [MonoidStr::cyclic(2), MonoidStr::cyclic(3)] {
            let b = b2();
            for action in enumerate_maps(&c.carrier().tensor(&b), &b).unwrap() {
                let m = ModuleStr::new(c.clone(), b.clone(), action).unwrap();
                assert_eq!(check_module(&m).is_empty(), module_diagrams_commute(&m));
            }
        }
    }

    #[test]
    fn comodules() {
        let z3 = MonoidStr::cyclic(3);
        let a: TensorObj = AtomObj::range("A", 2).into();
        let attr = FinMap::new(z3.carrier().clone(), a.clone(), vec![0, 1, 1]).unwrap();
        let cm = make_comodule(ComonoidStr::new(a.clone()), z3.carrier().clone(), attr).unwrap();
        let co = cm.coaction();
        assert_eq!(co.cod().render(co.apply(2)), "(2,1)");

        let single: TensorObj = AtomObj::range("One", 1).into();
        let triv = make_comodule(
            ComonoidStr::new(single.clone()),
            b2(),
            FinMap::constant(&b2(), &single, 0),
        );
        assert!(triv.is_ok());
        assert!(
            make_comodule(ComonoidStr::new(a.clone()), a.clone(), FinMap::identity(&a)).is_ok()
        );
        assert!(make_comodule(ComonoidStr::new(a.clone()), b2(), FinMap::identity(&a)).is_err());
    }

    #[test]
    fn convolution_examples() {
        let z3 = MonoidStr::cyclic(3);
        let a = ComonoidStr::new(z3.carrier().clone());
        let id = FinMap::identity(z3.carrier());
        let e = FinMap::constant(z3.carrier(), z3.carrier(), 0);
        assert_eq!(convolve(&id, &e, &a, &z3).unwrap(), id);
        assert_eq!(convolve(&id, &id, &a, &z3).unwrap().table(), &[0, 2, 1]);

        let z2 = MonoidStr::cyclic(2);
        let a2 = ComonoidStr::new(z2.carrier().clone());
        let id2 = FinMap::identity(z2.carrier());
        assert_eq!(convolve(&id2, &id2, &a2, &z2).unwrap().table(), &[0, 0]);
    }

    #[test]
    fn convolution_is_a_monoid() {
        for c in [MonoidStr::cyclic(2), MonoidStr::cyclic(3)] {
            for n in 1..=3 {
                let a = ComonoidStr::new(AtomObj::range("A", n).into());
                let maps: Vec<_> = enumerate_maps(a.carrier(), c.carrier()).unwrap().collect();
                let e = FinMap::constant(a.carrier(), c.carrier(), c.unit());
                for f in &maps {
                    assert_eq!(&convolve(f, &e, &a, &c).unwrap(), f);
                    assert_eq!(&convolve(&e, f, &a, &c).unwrap(), f);
                    for g in &maps {
                        let fg = convolve(f, g, &a, &c).unwrap();
                        for h in &maps {
                            let l = convolve(&fg, h, &a, &c).unwrap();
                            let r = convolve(f, &convolve(g, h, &a, &c).unwrap(), &a, &c).unwrap();
                            assert_eq!(l, r);
                        }
                    }
                }
            }
        }
    }
}
