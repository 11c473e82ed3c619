//! Interned categorical expressions and their normal forms.
//!
//! Expressions are hash-consed into a session-local arena so normal-form
//! equality is a handle comparison. The smart constructors (`World::comp`,
//! `World::pair`, ...) assume normalized arguments and return normalized
//! results, so every reachable [`ExprId`] denotes a canonical form.
//!
//! Orientation note: the ideal of types is represented by [`Expr::Ent`];
//! `Ent(a, b)` is the canonical type edge *from* `a` *to* `b`, printed
//! `a |- b`. Its inhabitants are the paths `a → b`, and it plays the role
//! of the exponential of `a` and `b`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Interned identifier (generator, indeterminate, or constant name).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NameId(pub u32);

/// Handle of an interned, normalized expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExprId(pub u32);

/// Expression nodes. Children are always normalized handles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expr {
    /// Declared generator.
    Gen(NameId),
    /// Indeterminate, sourced at top, target from its declaration.
    Indet(NameId),
    /// The distinguished terminal element.
    Top,
    /// Identity on an element.
    Id(ExprId),
    /// Composition `f · g` (`f` after `g`); kept left-leaning.
    Comp(ExprId, ExprId),
    /// Canonical type edge `a |- b` from `a` to `b`.
    Ent(ExprId, ExprId),
    /// Wedge `f ∧ g`.
    Wedge(ExprId, ExprId),
    /// Pairing `⟨f, g⟩`.
    Pair(ExprId, ExprId),
    /// Currying `f*`.
    Star(ExprId),
    /// First projection of the good pair for `(a, b)`.
    Proj1(ExprId, ExprId),
    /// Second projection of the good pair for `(a, b)`.
    Proj2(ExprId, ExprId),
    /// Good evaluation for `(a, b)`.
    Eval(ExprId, ExprId),
}

/// Raw (unelaborated) expression trees, as produced by parsers and tests.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum RawExpr {
    Gen(String),
    Top,
    Id(alloc::boxed::Box<RawExpr>),
    Comp(alloc::boxed::Box<RawExpr>, alloc::boxed::Box<RawExpr>),
    Ent(alloc::boxed::Box<RawExpr>, alloc::boxed::Box<RawExpr>),
    Wedge(alloc::boxed::Box<RawExpr>, alloc::boxed::Box<RawExpr>),
    Pair(alloc::boxed::Box<RawExpr>, alloc::boxed::Box<RawExpr>),
    Star(alloc::boxed::Box<RawExpr>),
    Proj1(alloc::boxed::Box<RawExpr>, alloc::boxed::Box<RawExpr>),
    Proj2(alloc::boxed::Box<RawExpr>, alloc::boxed::Box<RawExpr>),
    Eval(alloc::boxed::Box<RawExpr>, alloc::boxed::Box<RawExpr>),
}

#[derive(Debug, Clone, Copy)]
struct ExprMeta {
    src: ExprId,
    tgt: ExprId,
    /// The constant-map class 𝒦: declared constants and ⊤, terminal edges,
    /// indeterminate-free global elements, closed under ∧, ⟨,⟩, ()*, and
    /// composition with a constant factor. Guards type absorption and
    /// terminal collapse.
    kprot: bool,
    /// Contains a `Star` or `Eval` node (triggers the lambda fallback).
    has_star_or_eval: bool,
    /// Contains an indeterminate.
    has_indet: bool,
    /// Contains a constant-headed element with terminal target; such
    /// elements are protected from terminal collapse, so the lambda
    /// fallback is unsound on them and is skipped.
    has_protected_terminal: bool,
    size: u32,
}

#[derive(Debug, Clone)]
struct GenDecl {
    /// Self-referential for objects.
    src: ExprId,
    tgt: ExprId,
    is_object: bool,
    in_k: bool,
}

#[derive(Debug, Clone)]
struct IndetDecl {
    tgt: ExprId,
}

/// Which equational theory the world's constructors enforce.
///
/// `Category` keeps only the generalized-category laws (identities,
/// associativity); `Iccc` adds the ideal cartesian closed rewrite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theory {
    Category,
    Iccc,
}

/// A session arena: interned expressions over one presentation.
///
/// All values are immutable once interned; two expressions interned in the
/// same session compare by handle. Cross-session comparison must go through
/// structural re-interning.
pub struct World {
    pub(crate) theory: Theory,
    names: Vec<String>,
    name_ids: BTreeMap<String, NameId>,
    gens: BTreeMap<NameId, GenDecl>,
    indets: BTreeMap<NameId, IndetDecl>,
    exprs: Vec<Expr>,
    expr_ids: BTreeMap<Expr, ExprId>,
    meta: Vec<ExprMeta>,
    /// Declared order pairs (gencat only); reflexive-transitive-congruence
    /// closure is taken on demand.
    order_pairs: Vec<(ExprId, ExprId)>,
    order_saturated: Vec<(ExprId, ExprId)>,
    /// Declared validity seeds.
    pub(crate) valid_seeds: BTreeSet<ExprId>,
    steps: core::cell::Cell<u64>,
    depth: core::cell::Cell<u32>,
    // Term-level tables live here too so the lambda side shares the arena.
    pub(crate) terms: Vec<crate::lam::Term>,
    pub(crate) term_ids: BTreeMap<crate::lam::Term, crate::lam::TermId>,
    pub(crate) term_meta: Vec<crate::lam::TermMeta>,
    pub(crate) term_consts: BTreeMap<NameId, ExprId>,
    pub(crate) term_reduce_memo: BTreeMap<crate::lam::TermId, crate::lam::TermId>,
    pub(crate) term_nf_memo: BTreeMap<crate::lam::TermId, crate::lam::TermId>,
    pub(crate) equal_memo: BTreeMap<(ExprId, ExprId), bool>,
}

const STEP_LIMIT: u64 = 50_000_000;

impl World {
    pub fn new(theory: Theory) -> Self {
        World {
            theory,
            names: Vec::new(),
            name_ids: BTreeMap::new(),
            gens: BTreeMap::new(),
            indets: BTreeMap::new(),
            exprs: Vec::new(),
            expr_ids: BTreeMap::new(),
            meta: Vec::new(),
            order_pairs: Vec::new(),
            order_saturated: Vec::new(),
            valid_seeds: BTreeSet::new(),
            steps: core::cell::Cell::new(0),
            depth: core::cell::Cell::new(0),
            terms: Vec::new(),
            term_ids: BTreeMap::new(),
            term_meta: Vec::new(),
            term_consts: BTreeMap::new(),
            term_reduce_memo: BTreeMap::new(),
            term_nf_memo: BTreeMap::new(),
            equal_memo: BTreeMap::new(),
        }
    }

    pub fn name_id(&mut self, name: &str) -> NameId {
        if let Some(&id) = self.name_ids.get(name) {
            return id;
        }
        let id = NameId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.name_ids.insert(name.to_string(), id);
        id
    }

    pub fn name_str(&self, id: NameId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn lookup_name(&self, name: &str) -> Option<NameId> {
        self.name_ids.get(name).copied()
    }

    fn ensure_fresh(&mut self, name: &str) -> Result<NameId> {
        let id = self.name_id(name);
        if self.gens.contains_key(&id) || self.indets.contains_key(&id) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        Ok(id)
    }

    /// Declare an object: a generator with `s(g) = t(g) = g`.
    pub fn declare_object(&mut self, name: &str) -> Result<ExprId> {
        let id = self.ensure_fresh(name)?;
        let eid = self.alloc(Expr::Gen(id), None);
        self.gens.insert(id, GenDecl { src: eid, tgt: eid, is_object: true, in_k: false });
        self.meta[eid.0 as usize] = ExprMeta {
            src: eid,
            tgt: eid,
            kprot: false,
            has_star_or_eval: false,
            has_indet: false,
            has_protected_terminal: false,
            size: 1,
        };
        Ok(eid)
    }

    /// Declare a generator with the given boundaries.
    pub fn declare_gen(&mut self, name: &str, src: ExprId, tgt: ExprId) -> Result<ExprId> {
        self.declare_gen_impl(name, src, tgt, false)
    }

    /// Declare a constant generator (member of 𝒦).
    pub fn declare_const(&mut self, name: &str, src: ExprId, tgt: ExprId) -> Result<ExprId> {
        self.declare_gen_impl(name, src, tgt, true)
    }

    fn declare_gen_impl(&mut self, name: &str, src: ExprId, tgt: ExprId, in_k: bool) -> Result<ExprId> {
        let id = self.ensure_fresh(name)?;
        self.gens.insert(id, GenDecl { src, tgt, is_object: false, in_k });
        self.gen_expr(id)
    }

    /// Declare an indeterminate `x : ⊤ → tgt`; `tgt` must not mention one.
    pub fn declare_indet(&mut self, name: &str, tgt: ExprId) -> Result<ExprId> {
        if self.meta(tgt).has_indet {
            return Err(Error::MalformedExpr(
                "indeterminate targets must lie in the base system".to_string(),
            ));
        }
        let id = self.ensure_fresh(name)?;
        self.indets.insert(id, IndetDecl { tgt });
        self.indet_expr(id)
    }

    pub fn is_declared_const(&self, name: NameId) -> bool {
        self.gens.get(&name).map(|g| g.in_k).unwrap_or(false)
    }

    pub fn indet_target(&self, name: NameId) -> Option<ExprId> {
        self.indets.get(&name).map(|d| d.tgt)
    }

    pub fn generator_names(&self) -> Vec<NameId> {
        self.gens.keys().copied().collect()
    }

    pub fn indet_names(&self) -> Vec<NameId> {
        self.indets.keys().copied().collect()
    }

    pub fn is_object_gen(&self, name: NameId) -> bool {
        self.gens.get(&name).map(|g| g.is_object).unwrap_or(false)
    }

    pub fn gen_boundaries(&self, name: NameId) -> Option<(ExprId, ExprId)> {
        self.gens.get(&name).map(|g| (g.src, g.tgt))
    }

    pub fn declare_valid(&mut self, e: ExprId) {
        self.valid_seeds.insert(e);
    }

    fn bump(&self) -> Result<()> {
        let n = self.steps.get() + 1;
        self.steps.set(n);
        if n > STEP_LIMIT {
            return Err(Error::Internal("normalizer step limit exceeded"));
        }
        Ok(())
    }

    pub fn reset_steps(&self) {
        self.steps.set(0);
    }

    fn enter(&self) -> Result<()> {
        let d = self.depth.get() + 1;
        self.depth.set(d);
        if d > 700 {
            return Err(Error::Internal("normalizer recursion limit exceeded"));
        }
        Ok(())
    }

    fn exit(&self) {
        self.depth.set(self.depth.get().saturating_sub(1));
    }

    // ----- interning ------------------------------------------------------

    fn alloc(&mut self, node: Expr, meta: Option<ExprMeta>) -> ExprId {
        if let Some(&id) = self.expr_ids.get(&node) {
            return id;
        }
        let id = ExprId(self.exprs.len() as u32);
        self.exprs.push(node);
        self.expr_ids.insert(node, id);
        // Placeholder meta; fixed up by the caller for self-referential nodes.
        self.meta.push(meta.unwrap_or(ExprMeta {
            src: id,
            tgt: id,
            kprot: false,
            has_star_or_eval: false,
            has_indet: false,
            has_protected_terminal: false,
            size: 1,
        }));
        id
    }

    pub fn node(&self, id: ExprId) -> Expr {
        self.exprs[id.0 as usize]
    }

    fn meta(&self, id: ExprId) -> ExprMeta {
        self.meta[id.0 as usize]
    }

    pub fn source(&self, id: ExprId) -> ExprId {
        self.meta(id).src
    }

    pub fn target(&self, id: ExprId) -> ExprId {
        self.meta(id).tgt
    }

    pub fn size(&self, id: ExprId) -> u32 {
        self.meta(id).size
    }

    pub fn is_object(&self, id: ExprId) -> bool {
        let m = self.meta(id);
        m.src == id && m.tgt == id
    }

    /// Membership in the constant-map class 𝒦 (see `ExprMeta::kprot`).
    pub fn kprot(&self, id: ExprId) -> bool {
        self.meta(id).kprot
    }

    pub fn has_star_or_eval(&self, id: ExprId) -> bool {
        self.meta(id).has_star_or_eval
    }

    pub fn has_indet(&self, id: ExprId) -> bool {
        self.meta(id).has_indet
    }

    pub fn has_protected_terminal(&self, id: ExprId) -> bool {
        self.meta(id).has_protected_terminal
    }

    /// Identity-like elements absorb composition: identities and objects.
    fn is_identity_like(&self, id: ExprId) -> bool {
        matches!(self.node(id), Expr::Id(_)) || self.is_object(id)
    }

    fn strip_identity(&self, id: ExprId) -> ExprId {
        match self.node(id) {
            Expr::Id(x) => x,
            _ => id,
        }
    }

    /// Decompose an element as a product of two factors: wedge nodes,
    /// identities of wedges, and the collapsed pair forms produced by the
    /// wedge route. The route factors are recovered by inverting the
    /// projection absorption.
    pub fn wedge_components(&mut self, x: ExprId) -> Result<Option<(ExprId, ExprId)>> {
        self.enter()?;
        let r = self.wedge_components_inner(x);
        self.exit();
        r
    }

    fn wedge_components_inner(&mut self, x: ExprId) -> Result<Option<(ExprId, ExprId)>> {
        match self.node(x) {
            Expr::Wedge(u, v) => Ok(Some((u, v))),
            Expr::Id(w) => match self.wedge_components(w)? {
                Some((u, v)) => {
                    let iu = self.id(u)?;
                    let iv = self.id(v)?;
                    Ok(Some((iu, iv)))
                }
                None => Ok(None),
            },
            Expr::Pair(p, q) => {
                let Some((a, b)) = self.pair_route_indices(p, q)? else {
                    return Ok(None);
                };
                let u = self.unroute_component(p, a, b, true)?;
                let v = self.unroute_component(q, a, b, false)?;
                match (u, v) {
                    (Some(u), Some(v)) => Ok(Some((u, v))),
                    _ => Ok(None),
                }
            }
            _ => Ok(None),
        }
    }

    /// The projection indices (a, b) of a routed pair: read off a surviving
    /// projection tail, or decompose the pair's own source.
    fn pair_route_indices(&mut self, p: ExprId, q: ExprId) -> Result<Option<(ExprId, ExprId)>> {
        for side in [p, q] {
            let tail = *self.spine(side).last().unwrap();
            match self.node(tail) {
                Expr::Proj1(a, b) | Expr::Proj2(a, b) => return Ok(Some((a, b))),
                _ => {}
            }
        }
        let src = self.source(p);
        self.wedge_components(src)
    }

    /// Invert `u · π` (resp. `v · π′`) for a routed component.
    fn unroute_component(
        &mut self,
        c: ExprId,
        a: ExprId,
        b: ExprId,
        first: bool,
    ) -> Result<Option<ExprId>> {
        let base = if first { a } else { b };
        let spine = self.spine(c);
        let tail = *spine.last().unwrap();
        // A surviving projection tail.
        match (self.node(tail), first) {
            (Expr::Proj1(x, y), true) | (Expr::Proj2(x, y), false) if x == a && y == b => {
                if spine.len() == 1 {
                    return Ok(Some(self.id(base)?));
                }
                return Ok(Some(self.raw_comp_spine(&spine[..spine.len() - 1])));
            }
            _ => {}
        }
        // An absorbed type edge at the tail: Ent(a∧b → c) = Ent(base → c)·π.
        if let Expr::Ent(w, c0) = self.node(tail) {
            if self.wedge_components(w)? == Some((a, b)) {
                let e = self.ent(base, c0)?;
                if spine.len() == 1 {
                    return Ok(Some(e));
                }
                let head = self.raw_comp_spine(&spine[..spine.len() - 1]);
                return Ok(Some(self.comp(head, e)?));
            }
        }
        // A distributed pair: ⟨r, s⟩ with both legs absorbed the same π.
        if let Expr::Pair(r, sq) = self.node(c) {
            let ur = self.unroute_component(r, a, b, first)?;
            let us = self.unroute_component(sq, a, b, first)?;
            if let (Some(ur), Some(us)) = (ur, us) {
                return Ok(Some(self.pair(ur, us)?));
            }
        }
        Ok(None)
    }

    // ----- interning ------------------------------------------------------

    fn intern(&mut self, node: Expr) -> ExprId {
        if let Some(&id) = self.expr_ids.get(&node) {
            return id;
        }
        // Allocate first with self-referential placeholder boundaries:
        // boundary computation may re-enter for nodes that are their own
        // source (products of objects), and the placeholder is then the
        // correct answer.
        let id = self.alloc(node, None);
        let meta = self.compute_meta(&node);
        self.meta[id.0 as usize] = meta;
        id
    }

    fn compute_meta(&mut self, node: &Expr) -> ExprMeta {
        let m = |w: &Self, id: ExprId| w.meta(id);
        let mut meta = match *node {
            Expr::Gen(n) => {
                let d = self.gens.get(&n).expect("generator declared");
                let (src, tgt, in_k) = (d.src, d.tgt, d.in_k);
                ExprMeta {
                    src,
                    tgt,
                    kprot: in_k,
                    has_star_or_eval: false,
                    has_indet: false,
                    has_protected_terminal: false,
                    size: 1,
                }
            }
            Expr::Indet(n) => {
                let tgt = self.indets.get(&n).expect("indeterminate declared").tgt;
                let top = self.top();
                ExprMeta {
                    src: top,
                    tgt,
                    kprot: false,
                    has_star_or_eval: false,
                    has_indet: true,
                    has_protected_terminal: false,
                    size: 1,
                }
            }
            Expr::Top => unreachable!("Top interned via World::top"),
            Expr::Id(a) => {
                let ma = m(self, a);
                ExprMeta {
                    src: a,
                    tgt: a,
                    kprot: false,
                    has_star_or_eval: ma.has_star_or_eval,
                    has_indet: ma.has_indet,
                    has_protected_terminal: ma.has_protected_terminal,
                    size: 1 + ma.size,
                }
            }
            Expr::Comp(f, g) => {
                let mf = m(self, f);
                let mg = m(self, g);
                ExprMeta {
                    src: mg.src,
                    tgt: mf.tgt,
                    kprot: mf.kprot || mg.kprot,
                    has_star_or_eval: mf.has_star_or_eval || mg.has_star_or_eval,
                    has_indet: mf.has_indet || mg.has_indet,
                    has_protected_terminal: mf.has_protected_terminal
                        || mg.has_protected_terminal,
                    size: 1 + mf.size + mg.size,
                }
            }
            Expr::Ent(a, b) => {
                let ma = m(self, a);
                let mb = m(self, b);
                ExprMeta {
                    src: a,
                    tgt: b,
                    kprot: self.node(b) == Expr::Top,
                    has_star_or_eval: ma.has_star_or_eval || mb.has_star_or_eval,
                    has_indet: ma.has_indet || mb.has_indet,
                    has_protected_terminal: ma.has_protected_terminal || mb.has_protected_terminal,
                    size: 1 + ma.size + mb.size,
                }
            }
            Expr::Wedge(f, g) => {
                let mf = m(self, f);
                let mg = m(self, g);
                let src = self.wedge_boundary(mf.src, mg.src);
                let tgt = self.wedge_boundary(mf.tgt, mg.tgt);
                ExprMeta {
                    src,
                    tgt,
                    kprot: mf.kprot && mg.kprot,
                    has_star_or_eval: mf.has_star_or_eval || mg.has_star_or_eval,
                    has_indet: mf.has_indet || mg.has_indet,
                    has_protected_terminal: mf.has_protected_terminal || mg.has_protected_terminal,
                    size: 1 + mf.size + mg.size,
                }
            }
            Expr::Pair(f, g) => {
                let mf = m(self, f);
                let mg = m(self, g);
                let tgt = self.wedge_boundary(mf.tgt, mg.tgt);
                ExprMeta {
                    src: mf.src,
                    tgt,
                    kprot: mf.kprot && mg.kprot,
                    has_star_or_eval: mf.has_star_or_eval || mg.has_star_or_eval,
                    has_indet: mf.has_indet || mg.has_indet,
                    has_protected_terminal: mf.has_protected_terminal || mg.has_protected_terminal,
                    size: 1 + mf.size + mg.size,
                }
            }
            Expr::Star(f) => {
                let mf = m(self, f);
                let (_, d) = self
                    .wedge_components(mf.src)
                    .ok()
                    .flatten()
                    .expect("star source checked by constructor");
                let tgt = if self.theory == Theory::Iccc && d == mf.tgt {
                    self.id(d).expect("identity of a well-formed element")
                } else {
                    self.intern(Expr::Ent(d, mf.tgt))
                };
                let src_c = self
                    .wedge_components(mf.src)
                    .ok()
                    .flatten()
                    .expect("star source checked by constructor")
                    .0;
                ExprMeta {
                    src: src_c,
                    tgt,
                    kprot: mf.kprot,
                    has_star_or_eval: true,
                    has_indet: mf.has_indet,
                    has_protected_terminal: mf.has_protected_terminal,
                    size: 1 + mf.size,
                }
            }
            Expr::Proj1(a, b) | Expr::Proj2(a, b) => {
                let src = self.wedge_boundary(a, b);
                let tgt = if matches!(*node, Expr::Proj1(..)) { a } else { b };
                let ma = m(self, a);
                let mb = m(self, b);
                ExprMeta {
                    src,
                    tgt,
                    kprot: false,
                    has_star_or_eval: ma.has_star_or_eval || mb.has_star_or_eval,
                    has_indet: ma.has_indet || mb.has_indet,
                    has_protected_terminal: ma.has_protected_terminal || mb.has_protected_terminal,
                    size: 1 + ma.size + mb.size,
                }
            }
            Expr::Eval(a, b) => {
                let e = if self.theory == Theory::Iccc && a == b {
                    self.id(a).expect("identity of a well-formed element")
                } else {
                    self.intern(Expr::Ent(a, b))
                };
                let src = self.wedge_boundary(e, a);
                let ma = m(self, a);
                let mb = m(self, b);
                ExprMeta {
                    src,
                    tgt: b,
                    kprot: false,
                    has_star_or_eval: true,
                    has_indet: ma.has_indet || mb.has_indet,
                    has_protected_terminal: ma.has_protected_terminal || mb.has_protected_terminal,
                    size: 1 + ma.size + mb.size,
                }
            }
        };
        // Indeterminate-free global elements are constant maps, except bare
        // type edges, identities, and the indeterminates themselves.
        if !meta.has_indet
            && self.node(meta.src) == Expr::Top
            && !matches!(*node, Expr::Ent(..) | Expr::Id(_) | Expr::Indet(_))
        {
            meta.kprot = true;
        }
        // A surviving constant with terminal target makes the lambda-side
        // translation unsound (its image would collapse to `*`). Canonical
        // terminal edges and ⊤ itself are exactly what such elements refuse
        // to collapse to, and translate soundly.
        if meta.kprot
            && self.node(meta.tgt) == Expr::Top
            && !matches!(*node, Expr::Top | Expr::Ent(..))
        {
            meta.has_protected_terminal = true;
        }
        meta
    }

    /// Wedge of two boundary expressions, through the normalizing
    /// constructor. Products of objects are their own boundaries and would
    /// re-enter the node being interned, so they are built raw.
    fn wedge_boundary(&mut self, a: ExprId, b: ExprId) -> ExprId {
        if self.theory == Theory::Category || (self.is_object(a) && self.is_object(b)) {
            return self.intern(Expr::Wedge(a, b));
        }
        self.wedge(a, b).expect("boundary wedge of well-formed elements")
    }

    // ----- public constructors (the normalizer) ---------------------------

    pub fn top(&mut self) -> ExprId {
        if let Some(&id) = self.expr_ids.get(&Expr::Top) {
            return id;
        }
        let id = self.alloc(Expr::Top, None);
        self.meta[id.0 as usize] = ExprMeta {
            src: id,
            tgt: id,
            kprot: true,
            has_star_or_eval: false,
            has_indet: false,
            has_protected_terminal: false,
            size: 1,
        };
        id
    }

    pub fn gen_expr(&mut self, name: NameId) -> Result<ExprId> {
        if !self.gens.contains_key(&name) {
            return Err(Error::UnknownName(self.name_str(name).to_string()));
        }
        let id = self.intern(Expr::Gen(name));
        // Terminal collapse at the atom level: a non-constant generator
        // targeting ⊤ is the canonical type edge to ⊤.
        if self.theory == Theory::Iccc {
            let m = self.meta(id);
            if self.node(m.tgt) == Expr::Top && !m.kprot && m.tgt != id {
                return self.ent(m.src, m.tgt);
            }
        }
        Ok(id)
    }

    pub fn indet_expr(&mut self, name: NameId) -> Result<ExprId> {
        if !self.indets.contains_key(&name) {
            return Err(Error::UnknownIndeterminate(self.name_str(name).to_string()));
        }
        let id = self.intern(Expr::Indet(name));
        if self.theory == Theory::Iccc {
            let m = self.meta(id);
            if self.node(m.tgt) == Expr::Top {
                return self.ent(m.src, m.tgt);
            }
        }
        Ok(id)
    }

    pub fn id(&mut self, a: ExprId) -> Result<ExprId> {
        self.bump()?;
        if self.is_object(a) {
            return Ok(a);
        }
        Ok(self.intern(Expr::Id(a)))
    }

    pub fn ent(&mut self, a: ExprId, b: ExprId) -> Result<ExprId> {
        self.bump()?;
        if self.theory == Theory::Iccc && a == b {
            return self.id(a);
        }
        Ok(self.intern(Expr::Ent(a, b)))
    }

    pub fn proj1(&mut self, a: ExprId, b: ExprId) -> Result<ExprId> {
        self.bump()?;
        if self.theory == Theory::Iccc && self.node(a) == Expr::Top {
            // π_{⊤,b} : ⊤∧b → ⊤ collapses to the terminal edge.
            let w = self.wedge_boundary(a, b);
            return self.ent(w, a);
        }
        Ok(self.intern(Expr::Proj1(a, b)))
    }

    pub fn proj2(&mut self, a: ExprId, b: ExprId) -> Result<ExprId> {
        self.bump()?;
        if self.theory == Theory::Iccc && self.node(b) == Expr::Top {
            let w = self.wedge_boundary(a, b);
            return self.ent(w, b);
        }
        Ok(self.intern(Expr::Proj2(a, b)))
    }

    pub fn eval(&mut self, a: ExprId, b: ExprId) -> Result<ExprId> {
        self.bump()?;
        if self.theory == Theory::Iccc && self.node(b) == Expr::Top {
            let e = self.ent(a, b)?;
            let w = self.wedge_boundary(e, a);
            return self.ent(w, b);
        }
        Ok(self.intern(Expr::Eval(a, b)))
    }

    pub fn wedge(&mut self, f: ExprId, g: ExprId) -> Result<ExprId> {
        self.enter()?;
        let r = self.wedge_inner(f, g);
        self.exit();
        r
    }

    fn wedge_inner(&mut self, f: ExprId, g: ExprId) -> Result<ExprId> {
        self.bump()?;
        if self.theory == Theory::Category {
            return Ok(self.intern(Expr::Wedge(f, g)));
        }
        // 1_a ∧ 1_b = 1_{a∧b} (objects are their own identities; a wedge of
        // bare objects is already an object, so only fire on an Id node).
        if self.is_identity_like(f)
            && self.is_identity_like(g)
            && (matches!(self.node(f), Expr::Id(_)) || matches!(self.node(g), Expr::Id(_)))
        {
            let x = self.strip_identity(f);
            let y = self.strip_identity(g);
            let w = self.wedge(x, y)?;
            return self.id(w);
        }
        // A wedge is a normal form only if its pair form ⟨f·π, g·π′⟩ does
        // not reduce (identity absorption aside); otherwise take that route.
        let sf = self.source(f);
        let sg = self.source(g);
        let p1 = self.proj1(sf, sg)?;
        let p2 = self.proj2(sf, sg)?;
        let c1 = self.comp(f, p1)?;
        let c2 = self.comp(g, p2)?;
        let f_reduced = !self.is_identity_like(f) && !self.is_concatenation(c1, f, p1);
        let g_reduced = !self.is_identity_like(g) && !self.is_concatenation(c2, g, p2);
        if f_reduced || g_reduced {
            return self.pair(c1, c2);
        }
        Ok(self.intern(Expr::Wedge(f, g)))
    }

    /// The spine tail if it is a type edge: `x = h · Ent(u,c)` or `x = Ent(u,c)`.
    fn ent_tail(&self, x: ExprId) -> Option<(ExprId, ExprId)> {
        let last = match self.node(x) {
            Expr::Comp(_, g) => g,
            _ => x,
        };
        match self.node(last) {
            Expr::Ent(u, c) => Some((u, c)),
            _ => None,
        }
    }

    pub fn star(&mut self, f: ExprId) -> Result<ExprId> {
        self.enter()?;
        let r = self.star_inner(f);
        self.exit();
        r
    }

    fn star_inner(&mut self, f: ExprId) -> Result<ExprId> {
        self.bump()?;
        let src = self.source(f);
        let Some((_, a)) = self.wedge_components(src)? else {
            return Err(Error::StarSourceNotWedge(self.render(src)));
        };
        if self.theory == Theory::Iccc {
            // ε* = 1 on the exponential.
            if let Expr::Eval(p, q) = self.node(f) {
                let e = self.ent(p, q)?;
                return self.id(e);
            }
            // The terminal-collapsed evaluation: ε_{d,⊤} is the canonical
            // edge (d⊢⊤)∧d → ⊤, and its star is still the identity.
            if let Expr::Ent(x, t) = self.node(f) {
                if self.node(t) == Expr::Top {
                    if let Some((c, d)) = self.wedge_components(x)? {
                        let e = self.ent(d, t)?;
                        if c == e {
                            return self.id(c);
                        }
                    }
                }
            }
            // (u · (g ∧ 1_a))* = u* · g  — star naturality, oriented to pull
            // the substitution out of the star.
            let spine = self.spine(f);
            if let Some(&last) = spine.last() {
                if let Expr::Wedge(g, h) = self.node(last) {
                    if self.is_identity_like(h) && spine.len() >= 1 {
                        let u = if spine.len() == 1 {
                            let tg = self.target(g);
                            let w = self.wedge(tg, a)?;
                            self.id(w)?
                        } else {
                            self.compose_spine(&spine[..spine.len() - 1])?
                        };
                        let su = self.star(u)?;
                        return self.comp(su, g);
                    }
                }
            }
        }
        Ok(self.intern(Expr::Star(f)))
    }

    /// Flattened composition spine, leftmost (outermost) first.
    pub fn spine(&self, e: ExprId) -> Vec<ExprId> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![e];
        while let Some(x) = stack.pop() {
            match self.node(x) {
                Expr::Comp(f, g) => {
                    stack.push(g);
                    stack.push(f);
                }
                _ => out.push(x),
            }
        }
        out
    }

    fn compose_spine(&mut self, parts: &[ExprId]) -> Result<ExprId> {
        let mut it = parts.iter();
        let first = *it.next().expect("nonempty spine");
        let mut acc = first;
        for &p in it {
            acc = self.comp(acc, p)?;
        }
        Ok(acc)
    }

    /// Rebuild a left-leaning composition node without re-normalizing.
    fn raw_comp_spine(&mut self, parts: &[ExprId]) -> ExprId {
        let mut acc = parts[0];
        for &p in &parts[1..] {
            acc = self.intern(Expr::Comp(acc, p));
        }
        acc
    }

    pub fn comp(&mut self, f: ExprId, g: ExprId) -> Result<ExprId> {
        self.enter()?;
        let r = self.comp_inner(f, g);
        self.exit();
        r
    }

    fn comp_inner(&mut self, f: ExprId, g: ExprId) -> Result<ExprId> {
        self.bump()?;
        let sf = self.source(f);
        let tg = self.target(g);
        if !self.leq(sf, tg) {
            return Err(Error::NotComposable {
                left_source: self.render(sf),
                right_target: self.render(tg),
            });
        }
        // Normalize the concatenated spine by adjacent reduction.
        let mut parts = self.spine(f);
        parts.extend(self.spine(g));
        self.normalize_spine(&mut parts)?;
        debug_assert!(!parts.is_empty());
        Ok(self.raw_comp_spine(&parts))
    }

    fn normalize_spine(&mut self, parts: &mut Vec<ExprId>) -> Result<()> {
        // Repeatedly reduce an adjacent pair; results are spliced back in.
        'scan: loop {
            self.bump()?;
            if parts.len() == 1 {
                return Ok(());
            }
            for i in 0..parts.len() - 1 {
                if let Some(r) = self.reduce_adjacent(parts[i], parts[i + 1])? {
                    let rest = self.spine(r);
                    parts.splice(i..i + 2, rest);
                    continue 'scan;
                }
            }
            return Ok(());
        }
    }

    /// One step of the binary composition rules on normalized `u · v`.
    fn reduce_adjacent(&mut self, u: ExprId, v: ExprId) -> Result<Option<ExprId>> {
        self.bump()?;
        // Identity laws (Def. 2.1(5,6)) hold in both theories.
        if self.is_identity_like(v) {
            return Ok(Some(u));
        }
        if self.is_identity_like(u) {
            return Ok(Some(v));
        }
        if self.theory == Theory::Category {
            return Ok(None);
        }
        match (self.node(u), self.node(v)) {
            // β for products.
            (Expr::Proj1(..), Expr::Pair(p, _)) => return Ok(Some(p)),
            (Expr::Proj2(..), Expr::Pair(_, q)) => return Ok(Some(q)),
            // π · (p ∧ q) = p · π
            (Expr::Proj1(..), Expr::Wedge(p, q)) => {
                let sp = self.source(p);
                let sq = self.source(q);
                let pr = self.proj1(sp, sq)?;
                return Ok(Some(self.comp(p, pr)?));
            }
            (Expr::Proj2(..), Expr::Wedge(p, q)) => {
                let sp = self.source(p);
                let sq = self.source(q);
                let pr = self.proj2(sp, sq)?;
                return Ok(Some(self.comp(q, pr)?));
            }
            // Good-evaluation laws: ε · ⟨w*·r, q⟩ = w · ⟨r, q⟩ and the wedge
            // counterpart ε · (w*·r ∧ q) = w · ⟨r·π, q·π′⟩.
            (Expr::Eval(..), Expr::Pair(p, q)) => {
                if let Some((w, rest)) = self.split_star_head(p) {
                    let r = match rest {
                        Some(r) => r,
                        None => {
                            let sp = self.source(p);
                            self.id(sp)?
                        }
                    };
                    let arg = self.pair(r, q)?;
                    return Ok(Some(self.comp(w, arg)?));
                }
            }
            (Expr::Eval(..), Expr::Wedge(p, q)) => {
                if let Some((w, rest)) = self.split_star_head(p) {
                    let sp = self.source(p);
                    let sq = self.source(q);
                    let pr1 = self.proj1(sp, sq)?;
                    let pr2 = self.proj2(sp, sq)?;
                    let left = match rest {
                        Some(r) => self.comp(r, pr1)?,
                        None => pr1,
                    };
                    let right = self.comp(q, pr2)?;
                    let arg = self.pair(left, right)?;
                    return Ok(Some(self.comp(w, arg)?));
                }
            }
            // (f ∧ g) · (p ∧ q) = (f·p) ∧ (g·q)
            (Expr::Wedge(f, g), Expr::Wedge(p, q)) => {
                let l = self.comp(f, p)?;
                let r = self.comp(g, q)?;
                return Ok(Some(self.wedge(l, r)?));
            }
            // (f ∧ g) · ⟨p, q⟩ = ⟨f·p, g·q⟩
            (Expr::Wedge(f, g), Expr::Pair(p, q)) => {
                let l = self.comp(f, p)?;
                let r = self.comp(g, q)?;
                return Ok(Some(self.pair(l, r)?));
            }
            _ => {}
        }
        // Type absorption, target side (Def. d.icat(4)); no constant guard.
        if let Expr::Ent(_, d) = self.node(u) {
            let sv = self.source(v);
            return Ok(Some(self.ent(sv, d)?));
        }
        // Type absorption, source side (Def. d.icat(3)); constant maps on
        // either side protect the composite.
        if let Expr::Ent(w, _) = self.node(v) {
            if !self.kprot(u) && !self.kprot(v) {
                let tu = self.target(u);
                return Ok(Some(self.ent(w, tu)?));
            }
            return Ok(None);
        }
        // ⟨p, q⟩ · v distributes when a component genuinely reduces.
        if let Expr::Pair(p, q) = self.node(u) {
            let cp = self.comp(p, v)?;
            let cq = self.comp(q, v)?;
            let trivially_p = self.is_concatenation(cp, p, v);
            let trivially_q = self.is_concatenation(cq, q, v);
            if !(trivially_p && trivially_q) {
                return Ok(Some(self.pair(cp, cq)?));
            }
        }
        Ok(None)
    }

    fn is_concatenation(&self, result: ExprId, p: ExprId, v: ExprId) -> bool {
        let mut expect = self.spine(p);
        expect.extend(self.spine(v));
        self.spine(result) == expect
    }

    /// Split `p` as `Star(w) · rest` along the spine head.
    fn split_star_head(&mut self, p: ExprId) -> Option<(ExprId, Option<ExprId>)> {
        let parts = self.spine(p);
        if let Expr::Star(w) = self.node(parts[0]) {
            if parts.len() == 1 {
                return Some((w, None));
            }
            let rest = self.raw_comp_spine(&parts[1..]);
            return Some((w, Some(rest)));
        }
        None
    }

    pub fn pair(&mut self, p: ExprId, q: ExprId) -> Result<ExprId> {
        self.enter()?;
        let r = self.pair_inner(p, q);
        self.exit();
        r
    }

    fn pair_inner(&mut self, p: ExprId, q: ExprId) -> Result<ExprId> {
        self.bump()?;
        let sp = self.source(p);
        let sq = self.source(q);
        if sp != sq {
            return Err(Error::PairSourceMismatch { left: self.render(sp), right: self.render(sq) });
        }
        if self.theory == Theory::Category {
            return Ok(self.intern(Expr::Pair(p, q)));
        }
        let spine_p = self.spine(p);
        let spine_q = self.spine(q);
        // Factor the longest common tail: ⟨h·X, k·X⟩ = ⟨h, k⟩ · X. Never
        // factor both prefixes away entirely.
        let mut k = 0;
        while k < spine_p.len() && k < spine_q.len() {
            let a = spine_p[spine_p.len() - 1 - k];
            let b = spine_q[spine_q.len() - 1 - k];
            if a != b {
                break;
            }
            if k + 1 == spine_p.len() && k + 1 == spine_q.len() {
                break;
            }
            k += 1;
        }
        if k > 0 {
            let suffix = self.raw_comp_spine(&spine_p[spine_p.len() - k..]);
            let ts = self.target(suffix);
            let hp = if spine_p.len() == k { self.id(ts)? } else { self.raw_comp_spine(&spine_p[..spine_p.len() - k]) };
            let hq = if spine_q.len() == k { self.id(ts)? } else { self.raw_comp_spine(&spine_q[..spine_q.len() - k]) };
            let head = self.pair(hp, hq)?;
            return self.comp(head, suffix);
        }
        // ⟨u·π, v·π′⟩ = u ∧ v: invert the wedge route (projection tails,
        // absorbed type edges, distributed pairs). The wedge is canonical
        // only when it would not route straight back to this pair.
        if let Some((a, b)) = self.pair_route_indices(p, q)? {
            let u = self.unroute_component(p, a, b, true)?;
            let v = self.unroute_component(q, a, b, false)?;
            if let (Some(u), Some(v)) = (u, v) {
                if !self.wedge_would_route(u, v)? {
                    return self.wedge(u, v);
                }
            }
        }
        // Pairs of type edges from a common source collapse into the wedge
        // type edge when either side is bare. Terminal edges are constant
        // maps and do not participate (the collapse derivation factors
        // through unprotected edges only).
        let pe = matches!(self.node(p), Expr::Ent(..));
        let qe = matches!(self.node(q), Expr::Ent(..));
        if pe || qe {
            let te_p = self.ent_tail(p);
            let te_q = self.ent_tail(q);
            if let (Some((u1, c1)), Some((u2, c2))) = (te_p, te_q) {
                let top = self.top();
                if u1 == u2 && c1 != top && c2 != top {
                    let tp = self.target(p);
                    let tq = self.target(q);
                    if tp != top && tq != top {
                        let w = self.wedge(tp, tq)?;
                        return self.ent(u1, w);
                    }
                }
            }
        }
        Ok(self.intern(Expr::Pair(p, q)))
    }

    /// Whether `u ∧ v` would take the pair route.
    fn wedge_would_route(&mut self, u: ExprId, v: ExprId) -> Result<bool> {
        if self.is_identity_like(u) && self.is_identity_like(v) {
            return Ok(false);
        }
        let su = self.source(u);
        let sv = self.source(v);
        let p1 = self.proj1(su, sv)?;
        let p2 = self.proj2(su, sv)?;
        let c1 = self.comp(u, p1)?;
        let c2 = self.comp(v, p2)?;
        let u_red = !self.is_identity_like(u) && !self.is_concatenation(c1, u, p1);
        let v_red = !self.is_identity_like(v) && !self.is_concatenation(c2, v, p2);
        Ok(u_red || v_red)
    }

    // ----- order (gencat) --------------------------------------------------

    pub fn declare_order(&mut self, a: ExprId, b: ExprId) -> Result<()> {
        self.order_pairs.push((a, b));
        self.saturate_order()?;
        Ok(())
    }

    /// Saturate declared pairs under boundary and identity congruence, then
    /// check antisymmetry on the finite saturated set.
    fn saturate_order(&mut self) -> Result<()> {
        let mut sat: BTreeSet<(ExprId, ExprId)> = self.order_pairs.iter().copied().collect();
        let mut work: Vec<(ExprId, ExprId)> = sat.iter().copied().collect();
        while let Some((a, b)) = work.pop() {
            let derived = [
                (self.source(a), self.source(b)),
                (self.target(a), self.target(b)),
                {
                    let ia = self.id(a)?;
                    let ib = self.id(b)?;
                    (ia, ib)
                },
            ];
            for (x, y) in derived {
                if x != y && sat.insert((x, y)) {
                    // Identity congruence is one level deep per declared pair;
                    // deeper wrappings are handled structurally in `leq`.
                    if !(matches!(self.node(x), Expr::Id(_)) && matches!(self.node(y), Expr::Id(_))) {
                        work.push((x, y));
                    }
                }
            }
        }
        // Transitive closure on the finite set.
        loop {
            let mut added = false;
            let snapshot: Vec<_> = sat.iter().copied().collect();
            for &(a, b) in &snapshot {
                for &(c, d) in &snapshot {
                    if b == c && a != d && sat.insert((a, d)) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        for &(a, b) in &sat {
            if a != b && sat.contains(&(b, a)) {
                return Err(Error::OrderCycle(self.render(a), self.render(b)));
            }
        }
        self.order_saturated = sat.into_iter().collect();
        Ok(())
    }

    /// Decide `a ⪯ b` in the congruence closure of the declared pairs.
    /// With no declared pairs this is normal-form equality.
    pub fn leq(&self, a: ExprId, b: ExprId) -> bool {
        if a == b {
            return true;
        }
        if self.order_saturated.is_empty() {
            return false;
        }
        let mut seen = BTreeSet::new();
        self.leq_inner(a, b, &mut seen)
    }

    fn leq_inner(&self, a: ExprId, b: ExprId, seen: &mut BTreeSet<(ExprId, ExprId)>) -> bool {
        if a == b {
            return true;
        }
        if !seen.insert((a, b)) {
            return false;
        }
        if self.order_saturated.iter().any(|&(x, y)| x == a && y == b) {
            return true;
        }
        // Transitivity through declared pairs.
        for &(x, y) in &self.order_saturated {
            if x == a && self.leq_inner(y, b, seen) {
                return true;
            }
        }
        // Congruences: 1_a ⪯ 1_b and ac ⪯ bd follow from componentwise order.
        match (self.node(a), self.node(b)) {
            (Expr::Id(x), Expr::Id(y)) => self.leq_inner(x, y, seen),
            (Expr::Comp(f, g), Expr::Comp(h, k)) => {
                self.leq_inner(f, h, seen) && self.leq_inner(g, k, seen)
            }
            _ => false,
        }
    }

    // ----- raw elaboration --------------------------------------------------

    /// Elaborate (and thereby normalize) a raw expression tree.
    pub fn intern_raw(&mut self, raw: &RawExpr) -> Result<ExprId> {
        match raw {
            RawExpr::Gen(name) => {
                let id = self
                    .lookup_name(name)
                    .ok_or_else(|| Error::UnknownName(name.clone()))?;
                if self.indets.contains_key(&id) {
                    self.indet_expr(id)
                } else {
                    self.gen_expr(id)
                }
            }
            RawExpr::Top => Ok(self.top()),
            RawExpr::Id(a) => {
                let a = self.intern_raw(a)?;
                self.id(a)
            }
            RawExpr::Comp(f, g) => {
                let f = self.intern_raw(f)?;
                let g = self.intern_raw(g)?;
                self.comp(f, g)
            }
            RawExpr::Ent(a, b) => {
                let a = self.intern_raw(a)?;
                let b = self.intern_raw(b)?;
                self.ent(a, b)
            }
            RawExpr::Wedge(f, g) => {
                let f = self.intern_raw(f)?;
                let g = self.intern_raw(g)?;
                self.wedge(f, g)
            }
            RawExpr::Pair(f, g) => {
                let f = self.intern_raw(f)?;
                let g = self.intern_raw(g)?;
                self.pair(f, g)
            }
            RawExpr::Star(f) => {
                let f = self.intern_raw(f)?;
                self.star(f)
            }
            RawExpr::Proj1(a, b) => {
                let a = self.intern_raw(a)?;
                let b = self.intern_raw(b)?;
                self.proj1(a, b)
            }
            RawExpr::Proj2(a, b) => {
                let a = self.intern_raw(a)?;
                let b = self.intern_raw(b)?;
                self.proj2(a, b)
            }
            RawExpr::Eval(a, b) => {
                let a = self.intern_raw(a)?;
                let b = self.intern_raw(b)?;
                self.eval(a, b)
            }
        }
    }

    // ----- rendering --------------------------------------------------------

    /// Compact text rendering (the CLI has the full printer; this is for
    /// diagnostics and tests).
    pub fn render(&self, e: ExprId) -> String {
        match self.node(e) {
            Expr::Gen(n) | Expr::Indet(n) => self.name_str(n).to_string(),
            Expr::Top => "top".to_string(),
            Expr::Id(a) => format!("id({})", self.render(a)),
            Expr::Comp(f, g) => format!("{} . {}", self.render_atomish(f), self.render_atomish(g)),
            Expr::Ent(a, b) => format!("({} |- {})", self.render(a), self.render(b)),
            Expr::Wedge(f, g) => {
                format!("({} /\\ {})", self.render(f), self.render(g))
            }
            Expr::Pair(f, g) => format!("<{}, {}>", self.render(f), self.render(g)),
            Expr::Star(f) => format!("{}*", self.render_atomish(f)),
            Expr::Proj1(a, b) => format!("pi[{}, {}]", self.render(a), self.render(b)),
            Expr::Proj2(a, b) => format!("pi'[{}, {}]", self.render(a), self.render(b)),
            Expr::Eval(a, b) => format!("eps[{}, {}]", self.render(a), self.render(b)),
        }
    }

    fn render_atomish(&self, e: ExprId) -> String {
        match self.node(e) {
            Expr::Comp(..) | Expr::Ent(..) | Expr::Wedge(..) => format!("({})", self.render(e)),
            _ => self.render(e),
        }
    }

    /// Structural copy of an expression into another world, mapping
    /// generator and indeterminate names by string.
    pub fn transfer(&self, e: ExprId, dst: &mut World) -> Result<ExprId> {
        match self.node(e) {
            Expr::Gen(n) => {
                let id = dst
                    .lookup_name(self.name_str(n))
                    .ok_or_else(|| Error::UnknownName(self.name_str(n).to_string()))?;
                dst.gen_expr(id)
            }
            Expr::Indet(n) => {
                let id = dst
                    .lookup_name(self.name_str(n))
                    .ok_or_else(|| Error::UnknownIndeterminate(self.name_str(n).to_string()))?;
                dst.indet_expr(id)
            }
            Expr::Top => Ok(dst.top()),
            Expr::Id(a) => {
                let a = self.transfer(a, dst)?;
                dst.id(a)
            }
            Expr::Comp(f, g) => {
                let f = self.transfer(f, dst)?;
                let g = self.transfer(g, dst)?;
                dst.comp(f, g)
            }
            Expr::Ent(a, b) => {
                let a = self.transfer(a, dst)?;
                let b = self.transfer(b, dst)?;
                dst.ent(a, b)
            }
            Expr::Wedge(f, g) => {
                let f = self.transfer(f, dst)?;
                let g = self.transfer(g, dst)?;
                dst.wedge(f, g)
            }
            Expr::Pair(f, g) => {
                let f = self.transfer(f, dst)?;
                let g = self.transfer(g, dst)?;
                dst.pair(f, g)
            }
            Expr::Star(f) => {
                let f = self.transfer(f, dst)?;
                dst.star(f)
            }
            Expr::Proj1(a, b) => {
                let a = self.transfer(a, dst)?;
                let b = self.transfer(b, dst)?;
                dst.proj1(a, b)
            }
            Expr::Proj2(a, b) => {
                let a = self.transfer(a, dst)?;
                let b = self.transfer(b, dst)?;
                dst.proj2(a, b)
            }
            Expr::Eval(a, b) => {
                let a = self.transfer(a, dst)?;
                let b = self.transfer(b, dst)?;
                dst.eval(a, b)
            }
        }
    }
}
