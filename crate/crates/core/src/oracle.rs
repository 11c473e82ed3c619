//! Reference implementations for differential testing: exhaustive
//! rewrite-closure equality on raw trees, and forward-chaining enumeration
//! of valid elements. These deliberately share no code with the oriented
//! normalizer or the goal-directed prover they are used to check.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::Result;
use crate::expr::{Expr, ExprId, RawExpr, World};

fn b(r: RawExpr) -> Box<RawExpr> {
    Box::new(r)
}

fn raw_size(r: &RawExpr) -> usize {
    match r {
        RawExpr::Gen(_) | RawExpr::Top => 1,
        RawExpr::Id(a) | RawExpr::Star(a) => 1 + raw_size(a),
        RawExpr::Comp(x, y)
        | RawExpr::Ent(x, y)
        | RawExpr::Wedge(x, y)
        | RawExpr::Pair(x, y)
        | RawExpr::Proj1(x, y)
        | RawExpr::Proj2(x, y)
        | RawExpr::Eval(x, y) => 1 + raw_size(x) + raw_size(y),
    }
}

/// Render an interned expression back to a raw tree.
pub fn to_raw(world: &World, e: ExprId) -> RawExpr {
    match world.node(e) {
        Expr::Gen(n) | Expr::Indet(n) => RawExpr::Gen(world.name_str(n).into()),
        Expr::Top => RawExpr::Top,
        Expr::Id(a) => RawExpr::Id(b(to_raw(world, a))),
        Expr::Comp(f, g) => RawExpr::Comp(b(to_raw(world, f)), b(to_raw(world, g))),
        Expr::Ent(x, y) => RawExpr::Ent(b(to_raw(world, x)), b(to_raw(world, y))),
        Expr::Wedge(f, g) => RawExpr::Wedge(b(to_raw(world, f)), b(to_raw(world, g))),
        Expr::Pair(f, g) => RawExpr::Pair(b(to_raw(world, f)), b(to_raw(world, g))),
        Expr::Star(f) => RawExpr::Star(b(to_raw(world, f))),
        Expr::Proj1(x, y) => RawExpr::Proj1(b(to_raw(world, x)), b(to_raw(world, y))),
        Expr::Proj2(x, y) => RawExpr::Proj2(b(to_raw(world, x)), b(to_raw(world, y))),
        Expr::Eval(x, y) => RawExpr::Eval(b(to_raw(world, x)), b(to_raw(world, y))),
    }
}

struct Closure<'w> {
    world: &'w mut World,
    size_cap: usize,
    set_cap: usize,
}

impl<'w> Closure<'w> {
    /// Boundaries of a raw expression (invariant under the equations).
    fn boundaries(&mut self, r: &RawExpr) -> Option<(ExprId, ExprId)> {
        let e = self.world.intern_raw(r).ok()?;
        Some((self.world.source(e), self.world.target(e)))
    }

    /// Structural 𝒦-membership on the raw tree (mirrors the class used by
    /// the normalizer, without normalizing the node under test).
    fn kprot(&mut self, r: &RawExpr) -> bool {
        let structural = match r {
            RawExpr::Gen(n) => self
                .world
                .lookup_name(n)
                .map(|id| self.world.is_declared_const(id))
                .unwrap_or(false),
            RawExpr::Top => true,
            RawExpr::Ent(_, t) => match self.world.intern_raw(t) {
                Ok(e) => self.world.node(e) == Expr::Top,
                Err(_) => false,
            },
            RawExpr::Comp(f, g) => self.kprot(f) || self.kprot(g),
            RawExpr::Wedge(f, g) | RawExpr::Pair(f, g) => self.kprot(f) && self.kprot(g),
            RawExpr::Star(f) => self.kprot(f),
            RawExpr::Id(_) | RawExpr::Proj1(..) | RawExpr::Proj2(..) | RawExpr::Eval(..) => {
                false
            }
        };
        if structural {
            return true;
        }
        // Indeterminate-free global elements, except bare type edges and
        // identities.
        if matches!(r, RawExpr::Ent(..) | RawExpr::Id(_)) {
            return false;
        }
        match self.world.intern_raw(r) {
            Ok(e) => {
                !self.world.has_indet(e) && self.world.node(self.world.source(e)) == Expr::Top
            }
            Err(_) => false,
        }
    }

    fn is_identity_like(&mut self, r: &RawExpr) -> bool {
        match self.world.intern_raw(r) {
            Ok(e) => {
                matches!(self.world.node(e), Expr::Id(_)) || self.world.is_object(e)
            }
            Err(_) => false,
        }
    }

    /// All single-step rewrites of `r` at the root, both directions where
    /// the direction is determined by the redex. `in_index` suppresses the
    /// exponential η-expansion (see the decider's completeness note).
    fn root_steps(&mut self, r: &RawExpr, in_index: bool, out: &mut Vec<RawExpr>) {
        use RawExpr::*;
        match r {
            Comp(f, g) => {
                // Associativity, both ways.
                if let Comp(x, y) = &**f {
                    out.push(Comp(x.clone(), b(Comp(y.clone(), g.clone()))));
                }
                if let Comp(y, z) = &**g {
                    out.push(Comp(b(Comp(f.clone(), y.clone())), z.clone()));
                }
                // Identity absorption.
                if self.is_identity_like(g) {
                    out.push((**f).clone());
                }
                if self.is_identity_like(f) {
                    out.push((**g).clone());
                }
                // Projection beta and the wedge variants.
                if let (Proj1(_, _), Pair(p, _)) = (&**f, &**g) {
                    out.push((**p).clone());
                }
                if let (Proj2(_, _), Pair(_, q)) = (&**f, &**g) {
                    out.push((**q).clone());
                }
                if let (Proj1(_, _), Wedge(p, q)) = (&**f, &**g) {
                    if let Some((sp, _)) = self.boundaries(p) {
                        if let Some((sq, _)) = self.boundaries(q) {
                            let pr = Proj1(b(to_raw(self.world, sp)), b(to_raw(self.world, sq)));
                            out.push(Comp(p.clone(), b(pr)));
                        }
                    }
                }
                if let (Proj2(_, _), Wedge(p, q)) = (&**f, &**g) {
                    if let Some((sp, _)) = self.boundaries(p) {
                        if let Some((sq, _)) = self.boundaries(q) {
                            let pr = Proj2(b(to_raw(self.world, sp)), b(to_raw(self.world, sq)));
                            out.push(Comp(q.clone(), b(pr)));
                        }
                    }
                }
                // Evaluation beta: ε · ⟨w*·r, q⟩ = w · ⟨r, q⟩ and ε · ⟨w*, q⟩.
                if let (Eval(_, _), Pair(p, q)) = (&**f, &**g) {
                    if let Star(w) = &**p {
                        if let Some((sp, _)) = self.boundaries(p) {
                            let idp = Id(b(to_raw(self.world, sp)));
                            out.push(Comp(w.clone(), b(Pair(b(idp), q.clone()))));
                        }
                    }
                    if let Comp(h, rr) = &**p {
                        if let Star(w) = &**h {
                            out.push(Comp(w.clone(), b(Pair(rr.clone(), q.clone()))));
                        }
                    }
                }
                // Type absorption (target side); identity edges are the
                // stated exception and already absorb as identities.
                if let Ent(c, d) = &**f {
                    let identity_edge = match (self.world.intern_raw(c), self.world.intern_raw(d))
                    {
                        (Ok(x), Ok(y)) => x == y,
                        _ => false,
                    };
                    if !identity_edge {
                        if let Some((sg, _)) = self.boundaries(g) {
                            out.push(Ent(b(to_raw(self.world, sg)), d.clone()));
                        }
                    }
                }
                // Type absorption (source side); constant maps protect and
                // identity edges are excepted.
                if let Ent(u, c) = &**g {
                    let identity_edge = match (self.world.intern_raw(u), self.world.intern_raw(c))
                    {
                        (Ok(x), Ok(y)) => x == y,
                        _ => false,
                    };
                    if !identity_edge && !self.kprot(f) && !self.kprot(g) {
                        if let Some((_, tf)) = self.boundaries(f) {
                            out.push(Ent(u.clone(), b(to_raw(self.world, tf))));
                        }
                    }
                }
                // Functoriality of the wedge.
                if let (Wedge(p, q), Wedge(x, y)) = (&**f, &**g) {
                    out.push(Wedge(
                        b(Comp(p.clone(), x.clone())),
                        b(Comp(q.clone(), y.clone())),
                    ));
                }
                if let (Wedge(p, q), Pair(x, y)) = (&**f, &**g) {
                    out.push(Pair(
                        b(Comp(p.clone(), x.clone())),
                        b(Comp(q.clone(), y.clone())),
                    ));
                }
                // Pair post-composition distributes (and factors, below).
                if let Pair(p, q) = &**f {
                    out.push(Pair(
                        b(Comp(p.clone(), g.clone())),
                        b(Comp(q.clone(), g.clone())),
                    ));
                }
                // Star naturality, pulled out of the star.
                if let Star(w) = &**f {
                    let _ = w;
                    // (w* · g) = (w · (g ∧ 1))* ; expansion direction.
                    if let Some((sg, _)) = self.boundaries(g) {
                        if let Some((sf, _)) = self.boundaries(f) {
                            let _ = sf;
                            let one = Id(b(to_raw(self.world, sg)));
                            let _ = one;
                        }
                    }
                }
            }
            Pair(p, q) => {
                // Factoring a common tail.
                if let (Comp(x, h1), Comp(y, h2)) = (&**p, &**q) {
                    if h1 == h2 {
                        out.push(Comp(b(Pair(x.clone(), y.clone())), h1.clone()));
                    }
                }
                // Surjective pairing: ⟨π·x, π′·x⟩ = x.
                if let (Comp(f1, x1), Comp(f2, x2)) = (&**p, &**q) {
                    if x1 == x2 {
                        if let (Proj1(a1, b1), Proj2(a2, b2)) = (&**f1, &**f2) {
                            if a1 == a2 && b1 == b2 {
                                out.push((**x1).clone());
                            }
                        }
                    }
                }
                if let (Proj1(a1, b1), Proj2(a2, b2)) = (&**p, &**q) {
                    if a1 == a2 && b1 == b2 {
                        out.push(Id(b(Wedge(a1.clone(), b1.clone()))));
                    }
                }
                // Good-pair law (6): ⟨f·π, g·π′⟩ = f ∧ g.
                if let (Comp(x, pr1), Comp(y, pr2)) = (&**p, &**q) {
                    if let (Proj1(a1, b1), Proj2(a2, b2)) = (&**pr1, &**pr2) {
                        if a1 == a2 && b1 == b2 {
                            out.push(Wedge(x.clone(), y.clone()));
                        }
                    }
                }
                // One-sided variants with an implicit identity.
                if let Comp(x, pr1) = &**p {
                    if let (Proj1(a1, b1), Proj2(a2, b2)) = (&**pr1, &**q) {
                        if a1 == a2 && b1 == b2 {
                            out.push(Wedge(x.clone(), b(Id(b1.clone()))));
                        }
                    }
                }
                if let Comp(y, pr2) = &**q {
                    if let (Proj1(a1, b1), Proj2(a2, b2)) = (&**p, &**pr2) {
                        if a1 == a2 && b1 == b2 {
                            out.push(Wedge(b(Id(a1.clone())), y.clone()));
                        }
                    }
                }
                // Type-edge pairs collapse into the wedge edge (terminal
                // edges are constant maps and do not participate).
                let p_tail = ent_tail_raw(p);
                let q_tail = ent_tail_raw(q);
                if let (Some((up, cp)), Some((uq, cq))) = (p_tail, q_tail) {
                    let bare_p = matches!(&**p, Ent(..));
                    let bare_q = matches!(&**q, Ent(..));
                    let terminal =
                        matches!(cp, Top) || matches!(cq, Top);
                    if (bare_p || bare_q) && up == uq && !terminal {
                        if let (Some((_, tp)), Some((_, tq))) =
                            (self.boundaries(p), self.boundaries(q))
                        {
                            if self.world.node(tp) != gtt_core_expr_top(self.world)
                                && self.world.node(tq) != gtt_core_expr_top(self.world)
                            {
                                let w = Wedge(
                                    b(to_raw(self.world, tp)),
                                    b(to_raw(self.world, tq)),
                                );
                                out.push(Ent(b(up.clone()), b(w)));
                            }
                        }
                    }
                }
            }
            Wedge(f, g) => {
                if self.is_identity_like(f)
                    && self.is_identity_like(g)
                    && (matches!(&**f, Id(_)) || matches!(&**g, Id(_)))
                {
                    let sx = match &**f {
                        Id(x) => (**x).clone(),
                        _ => (**f).clone(),
                    };
                    let sy = match &**g {
                        Id(y) => (**y).clone(),
                        _ => (**g).clone(),
                    };
                    out.push(Id(b(Wedge(b(sx), b(sy)))));
                }
                // f ∧ g = ⟨f·π, g·π′⟩ (expansion; determined).
                if let (Some((sf, _)), Some((sg, _))) = (self.boundaries(f), self.boundaries(g)) {
                    let pr1 = Proj1(b(to_raw(self.world, sf)), b(to_raw(self.world, sg)));
                    let pr2 = Proj2(b(to_raw(self.world, sf)), b(to_raw(self.world, sg)));
                    out.push(Pair(
                        b(Comp(f.clone(), b(pr1))),
                        b(Comp(g.clone(), b(pr2))),
                    ));
                }
            }
            Id(a) => {
                // The identity of an object is the object.
                if let Ok(e) = self.world.intern_raw(a) {
                    if self.world.is_object(e) {
                        out.push((**a).clone());
                    }
                }
                // 1_{a∧b} = 1_a ∧ 1_b.
                if let Wedge(x, y) = &**a {
                    out.push(Wedge(b(Id(x.clone())), b(Id(y.clone()))));
                }
                // 1_{a⊢b} = ε*.
                if let Ent(x, y) = &**a {
                    out.push(Star(b(Eval(x.clone(), y.clone()))));
                }
                out.push(Ent(a.clone(), a.clone()));
            }
            Ent(x, y) => {
                if x == y {
                    out.push(Id(x.clone()));
                }
            }
            Star(f) => {
                // ε* = 1.
                if let Eval(x, y) = &**f {
                    out.push(Id(b(Ent(x.clone(), y.clone()))));
                }
                // (w · (g ∧ 1))* = w* · g.
                if let Comp(w, v) = &**f {
                    if let Wedge(g, h) = &**v {
                        if self.is_identity_like(h) {
                            out.push(Comp(b(Star(w.clone())), g.clone()));
                        }
                    }
                }
                if let Wedge(g, h) = &**f {
                    if self.is_identity_like(h) {
                        if let Some((_, tf)) = self.boundaries(f) {
                            let idw = Id(b(to_raw(self.world, tf)));
                            out.push(Comp(b(Star(b(idw))), g.clone()));
                        }
                    }
                }
            }
            _ => {}
        }
        // Terminal collapse: anything (not a constant map) into ⊤ is the
        // canonical edge.
        if let Some((s, t)) = self.boundaries(r) {
            if self.world.node(t) == Expr::Top
                && !matches!(r, RawExpr::Ent(..) | RawExpr::Id(_) | RawExpr::Top)
                && !self.kprot(r)
            {
                out.push(RawExpr::Ent(b(to_raw(self.world, s)), b(RawExpr::Top)));
            }
            // Exponential η-expansion: f = (ε · (f ∧ 1))* at an exponential
            // target (determined by the redex; not applied under indices).
            if in_index {
                return;
            }
            if let Expr::Ent(ea, eb) = self.world.node(t) {
                let ra = to_raw(self.world, ea);
                let rb = to_raw(self.world, eb);
                let wedge = RawExpr::Wedge(b(r.clone()), b(RawExpr::Id(b(ra.clone()))));
                out.push(RawExpr::Star(b(RawExpr::Comp(
                    b(RawExpr::Eval(b(ra), b(rb))),
                    b(wedge),
                ))));
            }
        }
    }

    /// All single-step rewrites at any position.
    pub(crate) fn steps(&mut self, r: &RawExpr, out: &mut Vec<RawExpr>) {
        self.steps_at(r, false, out)
    }

    fn steps_at(&mut self, r: &RawExpr, in_index: bool, out: &mut Vec<RawExpr>) {
        self.root_steps(r, in_index, out);
        use RawExpr::*;
        let rebuild_two = |x: RawExpr, y: RawExpr, which: &RawExpr| -> RawExpr {
            match which {
                Comp(..) => Comp(b(x), b(y)),
                Ent(..) => Ent(b(x), b(y)),
                Wedge(..) => Wedge(b(x), b(y)),
                Pair(..) => Pair(b(x), b(y)),
                Proj1(..) => Proj1(b(x), b(y)),
                Proj2(..) => Proj2(b(x), b(y)),
                Eval(..) => Eval(b(x), b(y)),
                _ => unreachable!(),
            }
        };
        match r {
            Gen(_) | Top => {}
            Id(a) => {
                let mut inner = Vec::new();
                self.steps_at(a, true, &mut inner);
                out.extend(inner.into_iter().map(|x| Id(b(x))));
            }
            Star(a) => {
                let mut inner = Vec::new();
                self.steps_at(a, in_index, &mut inner);
                out.extend(inner.into_iter().map(|x| Star(b(x))));
            }
            Comp(x, y) | Ent(x, y) | Wedge(x, y) | Pair(x, y) | Proj1(x, y) | Proj2(x, y)
            | Eval(x, y) => {
                let child_index = matches!(
                    r,
                    Ent(..) | Proj1(..) | Proj2(..) | Eval(..)
                ) || in_index;
                let mut inner = Vec::new();
                self.steps_at(x, child_index, &mut inner);
                for ix in inner {
                    out.push(rebuild_two(ix, (**y).clone(), r));
                }
                let mut inner = Vec::new();
                self.steps_at(y, child_index, &mut inner);
                for iy in inner {
                    out.push(rebuild_two((**x).clone(), iy, r));
                }
            }
        }
    }

    /// Explore the rewrite graph from the seeds; union-find over every
    /// discovered tree. Breadth-first so short derivations are found before
    /// the caps bite.
    fn partition(&mut self, seeds: &[RawExpr]) -> Partition {
        let mut part = Partition::default();
        let mut queue: alloc::collections::VecDeque<RawExpr> =
            alloc::collections::VecDeque::new();
        for sd in seeds {
            part.id_of(sd);
            queue.push_back(sd.clone());
        }
        let mut expanded = 0usize;
        while let Some(r) = queue.pop_front() {
            if expanded >= self.set_cap {
                break;
            }
            expanded += 1;
            let mut nexts = Vec::new();
            self.steps(&r, &mut nexts);
            let rid = part.id_of(&r);
            for n in nexts {
                if raw_size(&n) > self.size_cap {
                    continue;
                }
                if self.world.intern_raw(&n).is_err() {
                    continue;
                }
                let known = part.contains(&n);
                let nid = part.id_of(&n);
                part.union(rid, nid);
                if !known {
                    queue.push_back(n);
                }
            }
        }
        part
    }
}

/// Union-find over raw trees discovered during closure exploration.
#[derive(Default)]
pub struct Partition {
    ids: alloc::collections::BTreeMap<RawExpr, usize>,
    parent: Vec<usize>,
}

impl Partition {
    fn contains(&self, r: &RawExpr) -> bool {
        self.ids.contains_key(r)
    }

    fn id_of(&mut self, r: &RawExpr) -> usize {
        if let Some(&i) = self.ids.get(r) {
            return i;
        }
        let i = self.parent.len();
        self.parent.push(i);
        self.ids.insert(r.clone(), i);
        i
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    /// Class of a tree, if it was discovered.
    pub fn class(&mut self, r: &RawExpr) -> Option<usize> {
        let i = *self.ids.get(r)?;
        Some(self.find(i))
    }
}

/// All single-step rewrites of a raw tree at any position (well-formed
/// results only).
pub fn one_step_rewrites(world: &mut World, r: &RawExpr, size_cap: usize) -> Vec<RawExpr> {
    let mut c = Closure { world, size_cap, set_cap: 0 };
    let mut out = Vec::new();
    c.steps(r, &mut out);
    out.retain(|n| raw_size(n) <= size_cap && c.world.intern_raw(n).is_ok());
    out.sort();
    out.dedup();
    out
}

/// Partition a whole domain of raw trees by rewrite-closure equality.
pub fn closure_partition(
    world: &mut World,
    seeds: &[RawExpr],
    size_cap: usize,
    node_cap: usize,
) -> Partition {
    let mut c = Closure { world, size_cap, set_cap: node_cap };
    c.partition(seeds)
}

/// Exhaustive bidirectional rewrite-closure equality on a pair of raw
/// expressions: equal iff they land in one class of the explored graph.
pub fn closure_equal(world: &mut World, e1: &RawExpr, e2: &RawExpr) -> Result<bool> {
    let cap = raw_size(e1).max(raw_size(e2)) * 3 + 16;
    let mut part = closure_partition(world, &[e1.clone(), e2.clone()], cap, 6_000);
    Ok(part.class(e1) == part.class(e2))
}

/// Forward-chaining enumeration of valid elements up to a derivation depth,
/// over a bounded subject universe. Returns the set of boundary pairs of
/// enumerated valid elements.
pub fn enumerate_valid_boundaries(
    world: &mut World,
    subjects: &[ExprId],
    depth: u32,
) -> Result<BTreeSet<(ExprId, ExprId)>> {
    let mut valid: BTreeSet<ExprId> = world.valid_seeds.iter().copied().collect();
    for n in world.indet_names() {
        let e = world.indet_expr(n)?;
        valid.insert(e);
    }
    // Identities and canonical constants over the universe.
    for &a in subjects {
        let i = world.id(a)?;
        valid.insert(i);
        let top = world.top();
        let t = world.ent(a, top)?;
        valid.insert(t);
        for &bb in subjects {
            valid.insert(world.proj1(a, bb)?);
            valid.insert(world.proj2(a, bb)?);
            valid.insert(world.eval(a, bb)?);
        }
    }
    let size_cap = 40;
    for _ in 0..depth {
        let snapshot: Vec<ExprId> = valid.iter().copied().collect();
        let mut new: Vec<ExprId> = Vec::new();
        for &f in &snapshot {
            for &g in &snapshot {
                if world.size(f) + world.size(g) > size_cap {
                    continue;
                }
                if world.leq(world.source(f), world.target(g)) {
                    if let Ok(c) = world.comp(f, g) {
                        new.push(c);
                    }
                }
                if world.source(f) == world.source(g) {
                    if let Ok(p) = world.pair(f, g) {
                        new.push(p);
                    }
                }
            }
            if world.size(f) < size_cap {
                if let Ok(s) = world.star(f) {
                    new.push(s);
                }
            }
        }
        let before = valid.len();
        valid.extend(new);
        if valid.len() == before {
            break;
        }
    }
    Ok(valid.iter().map(|&e| (world.source(e), world.target(e))).collect())
}

fn ent_tail_raw(r: &RawExpr) -> Option<(&RawExpr, &RawExpr)> {
    match r {
        RawExpr::Ent(u, c) => Some((u, c)),
        RawExpr::Comp(_, g) => match &**g {
            RawExpr::Ent(u, c) => Some((u, c)),
            _ => None,
        },
        _ => None,
    }
}

fn gtt_core_expr_top(_w: &World) -> Expr {
    Expr::Top
}
