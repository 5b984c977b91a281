//! Bounded satisfiability at one fixed domain size.
//!
//! Decision variables are bits: one per atom/world, one per
//! action/subject/world, and one obligation-membership bit per
//! (context set, candidate set) pair over the full powerset grid.  Input
//! formulas compile to a hash-consed boolean circuit with quantifiers
//! unrolled inline and constants folded on the way; an `ob` application
//! whose context and body extensions fold to constants becomes a direct
//! reference to its membership bit.  Frame conditions are emitted as
//! clauses over the membership bits, one clause set per enabled condition.
//!
//! The search itself is chronological DPLL in a canonical variable order
//! (atoms, then actions, then obligation bits; world index fastest),
//! false-first, so the first model found is the lexicographically least —
//! which both pins down `find-model` output and keeps obligation families
//! minimal.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use crate::ast::{subject_name, world_name, Formula, SubjectRef};
use crate::bounds::Budget;
use crate::frame::FrameConditions;
use crate::model::{full_mask, Model, WorldMask};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum SolveError {
    Budget,
    Blowup { cap: u64 },
    MacroPresent(String),
    UnboundVariable(String),
    Internal(String),
}

pub(crate) struct BudgetState {
    pub nodes: u64,
    pub start: Instant,
}

impl BudgetState {
    pub fn new() -> Self {
        BudgetState { nodes: 0, start: Instant::now() }
    }

    pub fn millis(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }

    fn charge(&mut self, budget: &Budget) -> Result<(), SolveError> {
        self.nodes += 1;
        if self.nodes > budget.max_nodes {
            return Err(SolveError::Budget);
        }
        if self.nodes % 2048 == 0 && self.millis() > budget.max_millis {
            return Err(SolveError::Budget);
        }
        Ok(())
    }
}

pub(crate) struct SolveInput<'a> {
    /// Must be true at every world.
    pub hold_everywhere: &'a [Formula],
    /// Must each be true at at least one world.
    pub hold_somewhere: &'a [Formula],
    pub n_worlds: usize,
    pub n_subjects: usize,
    pub atoms: &'a [String],
    pub actions: &'a [String],
    pub interp: &'a BTreeMap<String, usize>,
    pub fc: &'a FrameConditions,
    pub instantiation_cap: u64,
}

struct VarMap {
    n_worlds: usize,
    n_subjects: usize,
    act_base: u32,
    ob_base: u32,
    grid: u32,
    n_vars: u32,
}

impl VarMap {
    fn new(input: &SolveInput) -> VarMap {
        let nw = input.n_worlds as u32;
        let ns = input.n_subjects as u32;
        let act_base = input.atoms.len() as u32 * nw;
        let ob_base = act_base + input.actions.len() as u32 * ns * nw;
        let grid = 1u32 << input.n_worlds;
        VarMap {
            n_worlds: input.n_worlds,
            n_subjects: input.n_subjects,
            act_base,
            ob_base,
            grid,
            n_vars: ob_base + grid * grid,
        }
    }

    fn atom_bit(&self, atom_idx: usize, w: usize) -> u32 {
        (atom_idx * self.n_worlds + w) as u32
    }

    fn act_bit(&self, act_idx: usize, subj: usize, w: usize) -> u32 {
        self.act_base + ((act_idx * self.n_subjects + subj) * self.n_worlds + w) as u32
    }

    fn ob_bit(&self, context: WorldMask, candidate: WorldMask) -> u32 {
        self.ob_base + context * self.grid + candidate
    }
}

const FALSE_ID: u32 = 0;
const TRUE_ID: u32 = 1;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Node {
    Const(bool),
    Var(u32),
    Not(u32),
    And(Box<[u32]>),
    Or(Box<[u32]>),
    /// Obligation with not-yet-constant extensions: per-world truth bits of
    /// the context and the body.  Resolves to a membership bit once every
    /// world bit is decided.
    ObDyn(Box<[u32]>, Box<[u32]>),
}

struct Builder {
    nodes: Vec<Node>,
    cons: HashMap<Node, u32>,
}

impl Builder {
    fn new() -> Builder {
        let mut b = Builder { nodes: Vec::new(), cons: HashMap::new() };
        b.intern(Node::Const(false));
        b.intern(Node::Const(true));
        b
    }

    fn intern(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.cons.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n.clone());
        self.cons.insert(n, id);
        id
    }

    fn konst(&self, b: bool) -> u32 {
        if b {
            TRUE_ID
        } else {
            FALSE_ID
        }
    }

    fn var(&mut self, v: u32) -> u32 {
        self.intern(Node::Var(v))
    }

    fn not(&mut self, x: u32) -> u32 {
        match &self.nodes[x as usize] {
            Node::Const(b) => self.konst(!b),
            Node::Not(y) => *y,
            _ => self.intern(Node::Not(x)),
        }
    }

    fn nary(&mut self, or_gate: bool, xs: &[u32]) -> u32 {
        // For And: true units drop, false absorbs, nested Ands splice.
        let (unit, absorb) = if or_gate { (FALSE_ID, TRUE_ID) } else { (TRUE_ID, FALSE_ID) };
        let mut flat = Vec::with_capacity(xs.len());
        let mut stack: Vec<u32> = xs.iter().rev().copied().collect();
        while let Some(x) = stack.pop() {
            if x == unit {
                continue;
            }
            if x == absorb {
                return absorb;
            }
            match &self.nodes[x as usize] {
                Node::And(children) if !or_gate => {
                    for &c in children.iter().rev() {
                        stack.push(c);
                    }
                }
                Node::Or(children) if or_gate => {
                    for &c in children.iter().rev() {
                        stack.push(c);
                    }
                }
                _ => flat.push(x),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => unit,
            1 => flat[0],
            _ => {
                if or_gate {
                    self.intern(Node::Or(flat.into_boxed_slice()))
                } else {
                    self.intern(Node::And(flat.into_boxed_slice()))
                }
            }
        }
    }

    fn and(&mut self, xs: &[u32]) -> u32 {
        self.nary(false, xs)
    }

    fn or(&mut self, xs: &[u32]) -> u32 {
        self.nary(true, xs)
    }

    fn implies(&mut self, a: u32, b: u32) -> u32 {
        let na = self.not(a);
        self.or(&[na, b])
    }

    fn iff(&mut self, a: u32, b: u32) -> u32 {
        let na = self.not(a);
        let nb = self.not(b);
        let fwd = self.or(&[na, b]);
        let bwd = self.or(&[nb, a]);
        self.and(&[fwd, bwd])
    }

    fn const_mask(&self, bits: &[u32]) -> Option<WorldMask> {
        let mut m = 0;
        for (w, &id) in bits.iter().enumerate() {
            match self.nodes[id as usize] {
                Node::Const(true) => m |= 1 << w,
                Node::Const(false) => {}
                _ => return None,
            }
        }
        Some(m)
    }

    fn ob_node(&mut self, ctx: Vec<u32>, body: Vec<u32>, vm: &VarMap) -> u32 {
        match (self.const_mask(&ctx), self.const_mask(&body)) {
            (Some(x), Some(y)) => self.var(vm.ob_bit(x, y)),
            _ => self.intern(Node::ObDyn(ctx.into_boxed_slice(), body.into_boxed_slice())),
        }
    }
}

enum CBind {
    Subject(usize),
    Term(WorldMask),
    Open(Vec<WorldMask>),
}

struct Compiler<'a> {
    b: Builder,
    vm: VarMap,
    input: &'a SolveInput<'a>,
    env: Vec<(String, CBind)>,
    inst_used: u64,
}

impl<'a> Compiler<'a> {
    fn charge(&mut self) -> Result<(), SolveError> {
        self.inst_used += 1;
        if self.inst_used > self.input.instantiation_cap {
            Err(SolveError::Blowup { cap: self.input.instantiation_cap })
        } else {
            Ok(())
        }
    }

    fn lookup(&self, name: &str) -> Option<&CBind> {
        self.env
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b)
    }

    fn subject_index(&self, s: &SubjectRef) -> Result<usize, SolveError> {
        match s {
            SubjectRef::Var(v) => match self.lookup(v) {
                Some(CBind::Subject(i)) => Ok(*i),
                _ => Err(SolveError::UnboundVariable(v.clone())),
            },
            SubjectRef::Const(c) => self
                .input
                .interp
                .get(c)
                .copied()
                .ok_or_else(|| SolveError::Internal(format!("uninterpreted constant `{c}`"))),
        }
    }

    fn mask_bits(&mut self, m: WorldMask) -> Vec<u32> {
        (0..self.input.n_worlds)
            .map(|w| self.b.konst(m & (1 << w) != 0))
            .collect()
    }

    /// Compile a formula to one circuit node per world.
    fn compile(&mut self, f: &Formula) -> Result<Vec<u32>, SolveError> {
        let nw = self.input.n_worlds;
        match f {
            Formula::Top => Ok(vec![TRUE_ID; nw]),
            Formula::Atom(a) => {
                let ai = self
                    .input
                    .atoms
                    .iter()
                    .position(|x| x == a)
                    .ok_or_else(|| SolveError::Internal(format!("atom `{a}` outside signature")))?;
                Ok((0..nw).map(|w| self.b.var(self.vm.atom_bit(ai, w))).collect())
            }
            Formula::Apply(a, s) => {
                let ci = self
                    .input
                    .actions
                    .iter()
                    .position(|x| x == a)
                    .ok_or_else(|| {
                        SolveError::Internal(format!("action `{a}` outside signature"))
                    })?;
                let si = self.subject_index(s)?;
                Ok((0..nw).map(|w| self.b.var(self.vm.act_bit(ci, si, w))).collect())
            }
            Formula::OpenApply(v, s) => {
                let si = self.subject_index(s)?;
                match self.lookup(v) {
                    Some(CBind::Open(row)) => {
                        let m = row[si];
                        Ok(self.mask_bits(m))
                    }
                    _ => Err(SolveError::UnboundVariable(v.clone())),
                }
            }
            Formula::TermVar(v) => match self.lookup(v) {
                Some(CBind::Term(m)) => {
                    let m = *m;
                    Ok(self.mask_bits(m))
                }
                _ => Err(SolveError::UnboundVariable(v.clone())),
            },
            Formula::TermConst(m) => Ok(self.mask_bits(*m)),
            Formula::OpenConst(row, s) => {
                let si = self.subject_index(s)?;
                let m = row[si];
                Ok(self.mask_bits(m))
            }
            Formula::Not(a) => {
                let v = self.compile(a)?;
                Ok(v.into_iter().map(|x| self.b.not(x)).collect())
            }
            Formula::And(a, b) => {
                let (va, vb) = (self.compile(a)?, self.compile(b)?);
                Ok((0..nw).map(|w| self.b.and(&[va[w], vb[w]])).collect())
            }
            Formula::Or(a, b) => {
                let (va, vb) = (self.compile(a)?, self.compile(b)?);
                Ok((0..nw).map(|w| self.b.or(&[va[w], vb[w]])).collect())
            }
            Formula::Implies(a, b) => {
                let (va, vb) = (self.compile(a)?, self.compile(b)?);
                Ok((0..nw).map(|w| self.b.implies(va[w], vb[w])).collect())
            }
            Formula::Iff(a, b) => {
                let (va, vb) = (self.compile(a)?, self.compile(b)?);
                Ok((0..nw).map(|w| self.b.iff(va[w], vb[w])).collect())
            }
            Formula::Nec(a) => {
                let v = self.compile(a)?;
                let all = self.b.and(&v);
                Ok(vec![all; nw])
            }
            Formula::Ob(body, ctx) => {
                let cv = self.compile(ctx)?;
                let bv = self.compile(body)?;
                let id = self.b.ob_node(cv, bv, &self.vm);
                Ok(vec![id; nw])
            }
            Formula::ForallSubject(v, body) => {
                let mut parts = Vec::new();
                for i in 0..self.input.n_subjects {
                    self.charge()?;
                    self.env.push((v.clone(), CBind::Subject(i)));
                    let r = self.compile(body);
                    self.env.pop();
                    parts.push(r?);
                }
                Ok(self.conjoin(parts))
            }
            Formula::ForallTerm(v, body) => {
                let full = full_mask(nw);
                let mut parts = Vec::new();
                for m in 0..=full {
                    self.charge()?;
                    self.env.push((v.clone(), CBind::Term(m)));
                    let r = self.compile(body);
                    self.env.pop();
                    parts.push(r?);
                }
                Ok(self.conjoin(parts))
            }
            Formula::ForallOpen(v, body) => {
                let full = full_mask(nw);
                let ns = self.input.n_subjects;
                let mut parts = Vec::new();
                let mut row: Vec<WorldMask> = vec![0; ns];
                'outer: loop {
                    self.charge()?;
                    self.env.push((v.clone(), CBind::Open(row.clone())));
                    let r = self.compile(body);
                    self.env.pop();
                    parts.push(r?);
                    let mut k = 0;
                    loop {
                        if k == ns {
                            break 'outer;
                        }
                        if row[k] < full {
                            row[k] += 1;
                            break;
                        }
                        row[k] = 0;
                        k += 1;
                    }
                }
                Ok(self.conjoin(parts))
            }
            // The body of a maxim binder cannot mention the bound variable
            // once macros are expanded, so the instance conjunction
            // collapses.
            Formula::ForallMaxim(_, body) => {
                self.charge()?;
                self.compile(body)
            }
            Formula::MacroCall(name, _) => Err(SolveError::MacroPresent(name.clone())),
        }
    }

    fn conjoin(&mut self, parts: Vec<Vec<u32>>) -> Vec<u32> {
        let nw = self.input.n_worlds;
        (0..nw)
            .map(|w| {
                let ids: Vec<u32> = parts.iter().map(|p| p[w]).collect();
                self.b.and(&ids)
            })
            .collect()
    }
}

type Lit = (u32, bool); // (var, polarity): true = positive literal

fn frame_clauses(input: &SolveInput, vm: &VarMap) -> Vec<Vec<Lit>> {
    let full = full_mask(input.n_worlds);
    let fc = input.fc;
    let mut out = Vec::new();
    let subsets = || 0..=full;
    for x in subsets() {
        if fc.c1 {
            out.push(vec![(vm.ob_bit(x, 0), false)]);
        }
        if fc.c2 {
            for y in subsets() {
                for z in subsets() {
                    if y < z && y & x == z & x {
                        out.push(vec![(vm.ob_bit(x, y), false), (vm.ob_bit(x, z), true)]);
                        out.push(vec![(vm.ob_bit(x, z), false), (vm.ob_bit(x, y), true)]);
                    }
                }
            }
        }
        if fc.c3 {
            for y in subsets() {
                for z in subsets() {
                    let meet = y & z;
                    if y <= z && x & meet != 0 && meet != y && meet != z {
                        out.push(vec![
                            (vm.ob_bit(x, y), false),
                            (vm.ob_bit(x, z), false),
                            (vm.ob_bit(x, meet), true),
                        ]);
                    }
                }
            }
        }
        if fc.c4 {
            for z in subsets() {
                if x & z == x && x != z {
                    for y in subsets() {
                        if y & x == y {
                            out.push(vec![
                                (vm.ob_bit(x, y), false),
                                (vm.ob_bit(z, (z & !x) | y), true),
                            ]);
                        }
                    }
                }
            }
        }
        if fc.c5 {
            for y in subsets() {
                if y & x == y && y != x {
                    for z in subsets() {
                        if y & z != 0 {
                            out.push(vec![(vm.ob_bit(x, z), false), (vm.ob_bit(y, z), true)]);
                        }
                    }
                }
            }
        }
    }
    out
}

const VAL_UNKNOWN: u8 = 0;
const VAL_FALSE: u8 = 1;
const VAL_TRUE: u8 = 2;

fn encode(v: Option<bool>) -> u8 {
    match v {
        None => VAL_UNKNOWN,
        Some(false) => VAL_FALSE,
        Some(true) => VAL_TRUE,
    }
}

fn decode(v: u8) -> Option<bool> {
    match v {
        VAL_FALSE => Some(false),
        VAL_TRUE => Some(true),
        _ => None,
    }
}

struct Dpll<'a> {
    nodes: &'a [Node],
    vm: &'a VarMap,
    roots: Vec<u32>,
    clauses: Vec<Vec<Lit>>,
    assign: Vec<u8>,
    trail: Vec<u32>,
    decisions: Vec<(u32, usize, bool)>,
    memo_val: Vec<u8>,
    memo_stamp: Vec<u32>,
    stamp: u32,
    budget: &'a Budget,
    state: &'a mut BudgetState,
}

enum StepResult {
    Sat,
    Unsat,
}

impl<'a> Dpll<'a> {
    fn value(&self, var: u32) -> Option<bool> {
        decode(self.assign[var as usize])
    }

    fn set(&mut self, var: u32, val: bool) -> Result<(), SolveError> {
        self.assign[var as usize] = encode(Some(val));
        self.trail.push(var);
        self.state.charge(self.budget)
    }

    /// Three-valued circuit evaluation with per-pass memoization.
    fn eval3(&mut self, id: u32) -> Option<bool> {
        if self.memo_stamp[id as usize] == self.stamp {
            return decode(self.memo_val[id as usize]);
        }
        // `nodes` lives as long as the slice, not as long as `&mut self`,
        // so child lists can be walked while recursing.
        let nodes = self.nodes;
        let v = match &nodes[id as usize] {
            Node::Const(b) => Some(*b),
            Node::Var(x) => self.value(*x),
            Node::Not(x) => {
                let x = *x;
                self.eval3(x).map(|b| !b)
            }
            Node::And(children) => {
                let mut unknown = false;
                let mut out = Some(true);
                for &c in children.iter() {
                    match self.eval3(c) {
                        Some(false) => {
                            out = Some(false);
                            break;
                        }
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if out == Some(false) {
                    Some(false)
                } else if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            Node::Or(children) => {
                let mut unknown = false;
                let mut out = Some(false);
                for &c in children.iter() {
                    match self.eval3(c) {
                        Some(true) => {
                            out = Some(true);
                            break;
                        }
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if out == Some(true) {
                    Some(true)
                } else if unknown {
                    None
                } else {
                    Some(false)
                }
            }
            Node::ObDyn(ctx, body) => {
                let x = self.eval_mask(ctx);
                let y = self.eval_mask(body);
                match (x, y) {
                    (Some(x), Some(y)) => self.value(self.vm.ob_bit(x, y)),
                    _ => None,
                }
            }
        };
        self.memo_val[id as usize] = encode(v);
        self.memo_stamp[id as usize] = self.stamp;
        v
    }

    fn eval_mask(&mut self, bits: &[u32]) -> Option<WorldMask> {
        let mut m = 0;
        for (w, &b) in bits.iter().enumerate() {
            match self.eval3(b) {
                Some(true) => m |= 1 << w,
                Some(false) => {}
                None => return None,
            }
        }
        Some(m)
    }

    /// Unit propagation over clauses interleaved with forced-literal
    /// propagation from the required-true circuit roots, to fixpoint.
    /// Returns true when consistent so far.
    fn propagate(&mut self) -> Result<bool, SolveError> {
        loop {
            let mut changed = false;
            loop {
                let mut clause_changed = false;
                for ci in 0..self.clauses.len() {
                    let mut unassigned: Option<Lit> = None;
                    let mut n_unassigned = 0;
                    let mut satisfied = false;
                    for &(var, pos) in &self.clauses[ci] {
                        match self.value(var) {
                            Some(v) if v == pos => {
                                satisfied = true;
                                break;
                            }
                            Some(_) => {}
                            None => {
                                n_unassigned += 1;
                                unassigned = Some((var, pos));
                            }
                        }
                    }
                    if satisfied {
                        continue;
                    }
                    match n_unassigned {
                        0 => return Ok(false),
                        1 => {
                            let (var, pos) = unassigned.unwrap();
                            self.set(var, pos)?;
                            clause_changed = true;
                        }
                        _ => {}
                    }
                }
                if !clause_changed {
                    break;
                }
                changed = true;
            }
            self.stamp = self.stamp.wrapping_add(1);
            let mut made = false;
            for i in 0..self.roots.len() {
                let r = self.roots[i];
                if !self.imply_true(r, &mut made)? {
                    return Ok(false);
                }
            }
            changed |= made;
            if !changed {
                break;
            }
        }
        Ok(true)
    }

    fn force(&mut self, var: u32, val: bool, made: &mut bool) -> Result<bool, SolveError> {
        match self.value(var) {
            Some(v) => Ok(v == val),
            None => {
                self.set(var, val)?;
                *made = true;
                Ok(true)
            }
        }
    }

    /// Assert that the node must be true under the current assignment,
    /// assigning any variable this forces.  Returns false on conflict.
    /// Assignments may leave this pass's memo stale, which only delays a
    /// forced literal to the next fixpoint round — determined memo entries
    /// stay correct because three-valued evaluation is monotone.
    fn imply_true(&mut self, id: u32, made: &mut bool) -> Result<bool, SolveError> {
        let nodes = self.nodes;
        match &nodes[id as usize] {
            Node::Const(b) => Ok(*b),
            Node::Var(v) => {
                let v = *v;
                self.force(v, true, made)
            }
            Node::Not(x) => {
                let x = *x;
                self.imply_false(x, made)
            }
            Node::And(children) => {
                for &c in children.iter() {
                    if !self.imply_true(c, made)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Node::Or(children) => {
                let mut last_unknown = None;
                let mut n_unknown = 0;
                for &c in children.iter() {
                    match self.eval3(c) {
                        Some(true) => return Ok(true),
                        Some(false) => {}
                        None => {
                            n_unknown += 1;
                            last_unknown = Some(c);
                        }
                    }
                }
                match n_unknown {
                    0 => Ok(false),
                    1 => self.imply_true(last_unknown.unwrap(), made),
                    _ => Ok(true),
                }
            }
            Node::ObDyn(ctx, body) => match (self.eval_mask(ctx), self.eval_mask(body)) {
                (Some(x), Some(y)) => {
                    let v = self.vm.ob_bit(x, y);
                    self.force(v, true, made)
                }
                _ => Ok(true),
            },
        }
    }

    /// Dual of [`imply_true`].
    fn imply_false(&mut self, id: u32, made: &mut bool) -> Result<bool, SolveError> {
        let nodes = self.nodes;
        match &nodes[id as usize] {
            Node::Const(b) => Ok(!*b),
            Node::Var(v) => {
                let v = *v;
                self.force(v, false, made)
            }
            Node::Not(x) => {
                let x = *x;
                self.imply_true(x, made)
            }
            Node::Or(children) => {
                for &c in children.iter() {
                    if !self.imply_false(c, made)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Node::And(children) => {
                let mut last_unknown = None;
                let mut n_unknown = 0;
                for &c in children.iter() {
                    match self.eval3(c) {
                        Some(false) => return Ok(true),
                        Some(true) => {}
                        None => {
                            n_unknown += 1;
                            last_unknown = Some(c);
                        }
                    }
                }
                match n_unknown {
                    0 => Ok(false),
                    1 => self.imply_false(last_unknown.unwrap(), made),
                    _ => Ok(true),
                }
            }
            Node::ObDyn(ctx, body) => match (self.eval_mask(ctx), self.eval_mask(body)) {
                (Some(x), Some(y)) => {
                    let v = self.vm.ob_bit(x, y);
                    self.force(v, false, made)
                }
                _ => Ok(true),
            },
        }
    }

    fn next_unassigned(&self) -> Option<u32> {
        self.assign
            .iter()
            .position(|&v| v == VAL_UNKNOWN)
            .map(|i| i as u32)
    }

    fn backtrack(&mut self) -> bool {
        while let Some((var, tlen, tried_true)) = self.decisions.pop() {
            while self.trail.len() > tlen {
                let v = self.trail.pop().unwrap();
                self.assign[v as usize] = VAL_UNKNOWN;
            }
            if !tried_true {
                self.decisions.push((var, tlen, true));
                self.assign[var as usize] = VAL_TRUE;
                self.trail.push(var);
                return true;
            }
        }
        false
    }

    fn search(&mut self) -> Result<StepResult, SolveError> {
        let mut consistent = self.propagate()?;
        loop {
            if !consistent {
                if !self.backtrack() {
                    return Ok(StepResult::Unsat);
                }
                self.state.charge(self.budget)?;
                consistent = self.propagate()?;
                continue;
            }
            match self.next_unassigned() {
                None => {
                    // Full assignment that survived propagation: every root
                    // evaluates determinately; re-check them for safety.
                    self.stamp = self.stamp.wrapping_add(1);
                    for i in 0..self.roots.len() {
                        let r = self.roots[i];
                        if self.eval3(r) != Some(true) {
                            return Err(SolveError::Internal(
                                "complete assignment left a root unsatisfied".to_string(),
                            ));
                        }
                    }
                    return Ok(StepResult::Sat);
                }
                Some(var) => {
                    self.decisions.push((var, self.trail.len(), false));
                    self.assign[var as usize] = VAL_FALSE;
                    self.trail.push(var);
                    self.state.charge(self.budget)?;
                    consistent = self.propagate()?;
                }
            }
        }
    }
}

/// A variable literal for the node, when it is one.
fn lit_of(b: &Builder, id: u32) -> Option<Lit> {
    match &b.nodes[id as usize] {
        Node::Var(v) => Some((*v, true)),
        Node::Not(x) => match &b.nodes[*x as usize] {
            Node::Var(v) => Some((*v, false)),
            _ => None,
        },
        _ => None,
    }
}

/// All-literal child list, negated or not, when the node is a flat
/// conjunction/disjunction of variable literals.
fn lits_of(b: &Builder, ids: &[u32], negate: bool) -> Option<Vec<Lit>> {
    ids.iter()
        .map(|&c| lit_of(b, c).map(|(v, p)| (v, p != negate)))
        .collect()
}

const CLAUSIFY_CAP: usize = 16;

/// Turn a disjunctive root into equivalent clauses when it is shallow
/// enough: literal children join one clause, a negated conjunction of
/// literals spills its negations into the clause, and a (possibly negated)
/// conjunctive child distributes, multiplying the clause set.  Gives up
/// beyond a small cap so clause count stays bounded.
fn try_clausify(b: &Builder, id: u32) -> Option<Vec<Vec<Lit>>> {
    let children: &[u32] = match &b.nodes[id as usize] {
        Node::Or(children) => children,
        _ => std::slice::from_ref(&id),
    };
    let mut base: Vec<Lit> = Vec::new();
    let mut factors: Vec<Vec<Lit>> = Vec::new();
    for &c in children {
        if let Some(l) = lit_of(b, c) {
            base.push(l);
            continue;
        }
        match &b.nodes[c as usize] {
            // ¬(x ∧ y ∧ …) contributes ¬x ∨ ¬y ∨ … to the clause.
            Node::Not(x) => match &b.nodes[*x as usize] {
                Node::And(xs) => base.extend(lits_of(b, xs, true)?),
                Node::Or(xs) => factors.push(lits_of(b, xs, true)?),
                _ => return None,
            },
            // A conjunctive child distributes over the disjunction.
            Node::And(xs) => factors.push(lits_of(b, xs, false)?),
            _ => return None,
        }
    }
    let n_clauses: usize = factors.iter().map(Vec::len).product();
    if n_clauses > CLAUSIFY_CAP {
        return None;
    }
    let mut clauses = vec![base];
    for factor in factors {
        clauses = clauses
            .into_iter()
            .flat_map(|c| {
                factor.iter().map(move |&l| {
                    let mut c = c.clone();
                    c.push(l);
                    c
                })
            })
            .collect();
    }
    Some(clauses)
}

/// Split conjunction roots into unit clauses, clausifiable parts, and
/// residual circuit roots.  Returns false if a root is constant-false.
fn split_roots(
    b: &Builder,
    top: Vec<u32>,
    clauses: &mut Vec<Vec<Lit>>,
    residual: &mut Vec<u32>,
) -> bool {
    let mut stack = top;
    while let Some(id) = stack.pop() {
        match &b.nodes[id as usize] {
            Node::Const(true) => {}
            Node::Const(false) => return false,
            Node::And(children) => stack.extend(children.iter().copied()),
            _ => match try_clausify(b, id) {
                Some(cs) => clauses.extend(cs),
                None => residual.push(id),
            },
        }
    }
    true
}

pub(crate) fn solve(
    input: &SolveInput,
    budget: &Budget,
    state: &mut BudgetState,
) -> Result<Option<Model>, SolveError> {
    let vm = VarMap::new(input);
    let mut compiler = Compiler {
        b: Builder::new(),
        vm,
        input,
        env: Vec::new(),
        inst_used: 0,
    };
    let mut top_all = Vec::new();
    for f in input.hold_everywhere {
        let bits = compiler.compile(f)?;
        let all = compiler.b.and(&bits);
        top_all.push(all);
    }
    for f in input.hold_somewhere {
        let bits = compiler.compile(f)?;
        let any = compiler.b.or(&bits);
        top_all.push(any);
    }
    let Compiler { b, vm, .. } = compiler;
    let mut clauses = frame_clauses(input, &vm);
    let mut residual = Vec::new();
    if !split_roots(&b, top_all, &mut clauses, &mut residual) {
        return Ok(None);
    }
    let mut dpll = Dpll {
        nodes: &b.nodes,
        vm: &vm,
        roots: residual,
        clauses,
        assign: vec![VAL_UNKNOWN; vm.n_vars as usize],
        trail: Vec::new(),
        decisions: Vec::new(),
        memo_val: vec![VAL_UNKNOWN; b.nodes.len()],
        memo_stamp: vec![u32::MAX; b.nodes.len()],
        stamp: 0,
        budget,
        state,
    };
    match dpll.search()? {
        StepResult::Unsat => Ok(None),
        StepResult::Sat => {
            let assign = dpll.assign;
            Ok(Some(extract_model(input, &vm, &assign)))
        }
    }
}

fn extract_model(input: &SolveInput, vm: &VarMap, assign: &[u8]) -> Model {
    let nw = input.n_worlds;
    let ns = input.n_subjects;
    let bit = |var: u32| assign[var as usize] == VAL_TRUE;
    let mut val = BTreeMap::new();
    for (ai, atom) in input.atoms.iter().enumerate() {
        let mut m = 0;
        for w in 0..nw {
            if bit(vm.atom_bit(ai, w)) {
                m |= 1 << w;
            }
        }
        val.insert(atom.clone(), m);
    }
    let mut act_val = BTreeMap::new();
    for (ci, action) in input.actions.iter().enumerate() {
        let mut row = Vec::with_capacity(ns);
        for s in 0..ns {
            let mut m = 0;
            for w in 0..nw {
                if bit(vm.act_bit(ci, s, w)) {
                    m |= 1 << w;
                }
            }
            row.push(m);
        }
        act_val.insert(action.clone(), row);
    }
    let mut ob: BTreeMap<WorldMask, BTreeSet<WorldMask>> = BTreeMap::new();
    let full = full_mask(nw);
    for x in 0..=full {
        let mut fam = BTreeSet::new();
        for y in 0..=full {
            if bit(vm.ob_bit(x, y)) {
                fam.insert(y);
            }
        }
        if !fam.is_empty() {
            ob.insert(x, fam);
        }
    }
    Model {
        worlds: (0..nw).map(world_name).collect(),
        subjects: (0..ns).map(subject_name).collect(),
        ob,
        val,
        act_val,
        subj_interp: input.interp.clone(),
    }
}
