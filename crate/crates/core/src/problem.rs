//! The SWCSP data model: variables with finite (or implicit string) domains,
//! hard constraints, and unary cost tables.
//!
//! Problems are immutable once built. Restriction, splitting and
//! sub-problem extraction all produce new values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ProblemError;

/// Dense variable index, contiguous from 0 within one problem.
pub type VarId = usize;

/// An opaque domain token: a color, a word, a letter string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Value(Arc<str>);

impl Value {
    pub fn new(token: impl AsRef<str>) -> Self {
        Value(Arc::from(token.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Byte at `position`, used by letter-crossing constraints.
    pub fn letter(&self, position: usize) -> Option<u8> {
        self.0.as_bytes().get(position).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::new(s)
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value(Arc::from(s))
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer).map(Value::from)
    }
}

/// A value together with its unary cost for some variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub value: Value,
    pub cost: f64,
}

impl Candidate {
    pub fn new(value: impl Into<Value>, cost: f64) -> Self {
        Candidate {
            value: value.into(),
            cost,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub id: VarId,
    pub name: String,
}

/// Letter pattern for string-valued variables: `Some(b)` where a crossing
/// fixes the byte, `None` where the position is free.
pub type Pattern = Vec<Option<u8>>;

pub fn pattern_matches(pattern: &[Option<u8>], value: &Value) -> bool {
    value.len() == pattern.len()
        && pattern
            .iter()
            .zip(value.as_str().bytes())
            .all(|(p, b)| p.is_none_or(|p| p == b))
}

/// Domain of a variable.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// A finite list of distinct tokens.
    Explicit(Vec<Value>),
    /// Every uppercase string of `length` letters. Only `candidates` (a
    /// cost-ordered prefix) is materialized; further members come from the
    /// problem's [`CandidateSource`] or are forced by crossing letters.
    Strings { length: usize, candidates: Vec<Candidate> },
}

impl Domain {
    pub fn contains(&self, value: &Value) -> bool {
        match self {
            Domain::Explicit(values) => values.contains(value),
            Domain::Strings { length, .. } => {
                value.len() == *length && value.as_str().bytes().all(|b| b.is_ascii_uppercase())
            }
        }
    }

    /// Number of materialized values.
    pub fn materialized_len(&self) -> usize {
        match self {
            Domain::Explicit(values) => values.len(),
            Domain::Strings { candidates, .. } => candidates.len(),
        }
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self, Domain::Strings { .. })
    }
}

/// Hard constraint.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    /// Extensional constraint: `scope` takes one of the `allowed` tuples.
    Table {
        scope: Vec<VarId>,
        allowed: BTreeSet<Vec<Value>>,
    },
    /// Two string variables agree on one letter: `vars[0]` at
    /// `positions[0]` equals `vars[1]` at `positions[1]`.
    Crossing { vars: [VarId; 2], positions: [usize; 2] },
    /// Residual of a crossing after its partner was fixed.
    LetterAt { var: VarId, position: usize, letter: u8 },
}

impl Constraint {
    pub fn scope(&self) -> Vec<VarId> {
        match self {
            Constraint::Table { scope, .. } => scope.clone(),
            Constraint::Crossing { vars, .. } => vars.to_vec(),
            Constraint::LetterAt { var, .. } => vec![*var],
        }
    }

    pub fn mentions(&self, v: VarId) -> bool {
        match self {
            Constraint::Table { scope, .. } => scope.contains(&v),
            Constraint::Crossing { vars, .. } => vars.contains(&v),
            Constraint::LetterAt { var, .. } => *var == v,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Constraint::Table { scope, .. } => scope.len(),
            Constraint::Crossing { .. } => 2,
            Constraint::LetterAt { .. } => 1,
        }
    }

    /// `Some(satisfied)` once every scope variable is bound, else `None`.
    pub fn check<'a>(&self, get: impl Fn(VarId) -> Option<&'a Value>) -> Option<bool> {
        match self {
            Constraint::Table { scope, allowed } => {
                let tuple = scope.iter().map(|&v| get(v).cloned()).collect::<Option<Vec<_>>>()?;
                Some(allowed.contains(&tuple))
            }
            Constraint::Crossing { vars, positions } => {
                let a = get(vars[0])?.letter(positions[0]);
                let b = get(vars[1])?.letter(positions[1]);
                Some(a.is_some() && a == b)
            }
            Constraint::LetterAt { var, position, letter } => Some(get(*var)?.letter(*position) == Some(*letter)),
        }
    }

    fn remap(&self, map: &[Option<VarId>]) -> Constraint {
        let m = |v: VarId| map[v].expect("constraint routed to a side that lacks its variables");
        match self {
            Constraint::Table { scope, allowed } => Constraint::Table {
                scope: scope.iter().map(|&v| m(v)).collect(),
                allowed: allowed.clone(),
            },
            Constraint::Crossing { vars, positions } => Constraint::Crossing {
                vars: [m(vars[0]), m(vars[1])],
                positions: *positions,
            },
            Constraint::LetterAt { var, position, letter } => Constraint::LetterAt {
                var: m(*var),
                position: *position,
                letter: *letter,
            },
        }
    }
}

/// Unary soft constraint: a cost for each value, with a designated default
/// for values missing from the table.
#[derive(Clone, Debug, PartialEq)]
pub struct UnaryCost {
    pub table: BTreeMap<Value, f64>,
    pub default: f64,
}

impl UnaryCost {
    pub fn new(table: BTreeMap<Value, f64>, default: f64) -> Result<Self, ProblemError> {
        for (value, &c) in &table {
            if !(c.is_finite() && c >= 0.0) {
                return Err(ProblemError::BadCost(format!("{value}: {c}")));
            }
        }
        if !(default.is_finite() && default >= 0.0) {
            return Err(ProblemError::BadCost(format!("default: {default}")));
        }
        Ok(UnaryCost { table, default })
    }

    pub fn get(&self, value: &Value) -> Option<f64> {
        self.table.get(value).copied()
    }
}

/// Supplies members of implicit string domains on demand.
pub trait CandidateSource: Send + Sync {
    /// Candidates for `var` matching `pattern`, in the source's preferred
    /// order (ascending cost within each phase), already capped.
    fn candidates(&self, var: VarId, pattern: &[Option<u8>]) -> Vec<Candidate>;

    /// Cost of an arbitrary member of `var`'s domain.
    fn cost(&self, var: VarId, value: &Value) -> f64;
}

/// Description of one variable used when building a problem.
#[derive(Clone, Debug)]
pub struct VariableSpec {
    pub name: String,
    pub domain: Domain,
}

/// A singly-weighted CSP.
#[derive(Clone)]
pub struct Swcsp {
    variables: Vec<Variable>,
    domains: Vec<Domain>,
    constraints: Vec<Constraint>,
    soft: Vec<Option<UnaryCost>>,
    source: Option<Arc<dyn CandidateSource>>,
    /// Variable id as known to `source`; survives restriction and splitting.
    source_ids: Vec<VarId>,
    incidence: Vec<Vec<usize>>,
    /// Per variable: each neighbor with the constraints shared with it.
    adjacency: Vec<Vec<(VarId, Vec<usize>)>>,
}

impl fmt::Debug for Swcsp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Swcsp")
            .field("variables", &self.variables)
            .field("domains", &self.domains)
            .field("constraints", &self.constraints)
            .field("soft", &self.soft)
            .field("has_source", &self.source.is_some())
            .finish()
    }
}

/// Structural equality: identical variables, domains and costs, and the
/// same constraint multiset irrespective of order.
impl PartialEq for Swcsp {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables
            && self.domains == other.domains
            && self.soft == other.soft
            && self.canonical_constraints() == other.canonical_constraints()
    }
}

impl Swcsp {
    pub fn new(
        variables: Vec<VariableSpec>,
        constraints: Vec<Constraint>,
        soft: Vec<(VarId, UnaryCost)>,
    ) -> Result<Self, ProblemError> {
        let n = variables.len();
        let mut seen = BTreeSet::new();
        let mut vars = Vec::with_capacity(n);
        let mut domains = Vec::with_capacity(n);
        for (id, spec) in variables.into_iter().enumerate() {
            if !seen.insert(spec.name.clone()) {
                return Err(ProblemError::DuplicateVariable(spec.name));
            }
            if let Domain::Explicit(values) = &spec.domain {
                let distinct: BTreeSet<_> = values.iter().collect();
                if distinct.len() != values.len() {
                    return Err(ProblemError::DuplicateValue(spec.name));
                }
            }
            vars.push(Variable { id, name: spec.name });
            domains.push(spec.domain);
        }

        let mut soft_by_var: Vec<Option<UnaryCost>> = vec![None; n];
        for (var, cost) in soft {
            let slot = soft_by_var.get_mut(var).ok_or(ProblemError::UnknownVariableId(var))?;
            if slot.is_some() {
                return Err(ProblemError::DuplicateCost(vars[var].name.clone()));
            }
            *slot = Some(cost);
        }

        let problem = Swcsp {
            source_ids: (0..n).collect(),
            incidence: Vec::new(),
            adjacency: Vec::new(),
            variables: vars,
            domains,
            constraints,
            soft: soft_by_var,
            source: None,
        };
        problem.validate_constraints()?;
        Ok(problem.reindexed())
    }

    /// Attach a source for implicit string domains.
    pub fn with_source(mut self, source: Arc<dyn CandidateSource>) -> Self {
        self.source = Some(source);
        self
    }

    fn validate_constraints(&self) -> Result<(), ProblemError> {
        let n = self.size();
        for c in &self.constraints {
            let scope = c.scope();
            if let Some(&bad) = scope.iter().find(|&&v| v >= n) {
                return Err(ProblemError::UnknownVariableId(bad));
            }
            let distinct: BTreeSet<_> = scope.iter().collect();
            if distinct.len() != scope.len() {
                return Err(ProblemError::BadConstraint(format!(
                    "scope {scope:?} repeats a variable"
                )));
            }
            if let Constraint::Table { scope, allowed } = c {
                for tuple in allowed {
                    if tuple.len() != scope.len() {
                        return Err(ProblemError::BadConstraint(format!(
                            "tuple {tuple:?} does not match scope of {} variables",
                            scope.len()
                        )));
                    }
                    for (&v, x) in scope.iter().zip(tuple) {
                        if !self.domains[v].contains(x) {
                            return Err(ProblemError::ValueNotInDomain {
                                var: self.variables[v].name.clone(),
                                value: x.to_string(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn reindexed(mut self) -> Self {
        let n = self.size();
        let mut incidence = vec![Vec::new(); n];
        let mut groups: Vec<BTreeMap<VarId, Vec<usize>>> = vec![BTreeMap::new(); n];
        for (i, c) in self.constraints.iter().enumerate() {
            let scope = c.scope();
            for &v in &scope {
                incidence[v].push(i);
                for &u in &scope {
                    if u != v {
                        groups[v].entry(u).or_default().push(i);
                    }
                }
            }
        }
        self.incidence = incidence;
        self.adjacency = groups.into_iter().map(|g| g.into_iter().collect()).collect();
        self
    }

    /// Number of variables.
    pub fn size(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable_by_name(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn domain(&self, v: VarId) -> &Domain {
        &self.domains[v]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn soft(&self, v: VarId) -> Option<&UnaryCost> {
        self.soft[v].as_ref()
    }

    /// Indices of constraints mentioning `v`.
    pub fn incident(&self, v: VarId) -> &[usize] {
        &self.incidence[v]
    }

    /// Variables sharing at least one constraint with `v`, ascending.
    pub fn neighbors(&self, v: VarId) -> impl Iterator<Item = VarId> + '_ {
        self.adjacency[v].iter().map(|(u, _)| *u)
    }

    /// Neighbors of `v` paired with the indices of the constraints they share.
    pub fn neighbor_groups(&self, v: VarId) -> &[(VarId, Vec<usize>)] {
        &self.adjacency[v]
    }

    pub fn has_source(&self) -> bool {
        self.source.is_some()
    }

    /// Largest materialized domain size (the `|D|` of the optimality bound).
    pub fn max_domain_size(&self) -> usize {
        self.domains.iter().map(Domain::materialized_len).max().unwrap_or(0)
    }

    /// Unary cost of `value` for `v`.
    pub fn value_cost(&self, v: VarId, value: &Value) -> f64 {
        if let Some(c) = self.soft[v].as_ref().and_then(|s| s.get(value)) {
            return c;
        }
        if let Domain::Strings { candidates, .. } = &self.domains[v] {
            if let Some(c) = candidates.iter().find(|c| &c.value == value) {
                return c.cost;
            }
            if let Some(source) = &self.source {
                return source.cost(self.source_ids[v], value);
            }
        }
        self.soft[v].as_ref().map_or(0.0, |s| s.default)
    }

    /// Materialized domain of `v` with costs attached, in domain order.
    pub fn candidates(&self, v: VarId) -> Vec<Candidate> {
        match &self.domains[v] {
            Domain::Explicit(values) => values
                .iter()
                .map(|x| Candidate::new(x.clone(), self.value_cost(v, x)))
                .collect(),
            Domain::Strings { candidates, .. } => candidates.clone(),
        }
    }

    /// Members of the implicit domain of `v` matching `pattern`. Falls back
    /// to filtering the materialized prefix, and to the fully forced string
    /// when nothing else fits.
    pub fn pattern_candidates(&self, v: VarId, pattern: &[Option<u8>]) -> Vec<Candidate> {
        let Domain::Strings { length, candidates } = &self.domains[v] else {
            return self
                .candidates(v)
                .into_iter()
                .filter(|c| pattern_matches(pattern, &c.value))
                .collect();
        };
        if pattern.len() != *length {
            return Vec::new();
        }
        if let Some(source) = &self.source {
            return source.candidates(self.source_ids[v], pattern);
        }
        let mut out: Vec<Candidate> = candidates
            .iter()
            .filter(|c| pattern_matches(pattern, &c.value))
            .cloned()
            .collect();
        if out.is_empty() {
            if let Some(forced) = forced_string(pattern) {
                let cost = self.value_cost(v, &forced);
                out.push(Candidate::new(forced, cost));
            }
        }
        out
    }

    /// Letters of `v` fixed by `assignment` through crossings and residual
    /// letter constraints. `None` if `v` has no string domain.
    pub fn pattern_for(&self, v: VarId, assignment: &Assignment) -> Option<Pattern> {
        let Domain::Strings { length, .. } = &self.domains[v] else {
            return None;
        };
        let mut pattern = vec![None; *length];
        for &ci in &self.incidence[v] {
            match &self.constraints[ci] {
                Constraint::Crossing { vars, positions } => {
                    let (mine, other, other_pos) = if vars[0] == v {
                        (positions[0], vars[1], positions[1])
                    } else {
                        (positions[1], vars[0], positions[0])
                    };
                    if let Some(letter) = assignment.get(other).and_then(|x| x.letter(other_pos)) {
                        if mine < *length {
                            pattern[mine] = Some(letter);
                        }
                    }
                }
                Constraint::LetterAt { position, letter, .. } if *position < *length => {
                    pattern[*position] = Some(*letter);
                }
                _ => {}
            }
        }
        Some(pattern)
    }

    fn check_binding(&self, v: VarId, x: &Value) -> Result<(), ProblemError> {
        if v >= self.size() {
            return Err(ProblemError::UnknownVariableId(v));
        }
        if !self.domains[v].contains(x) {
            return Err(ProblemError::ValueNotInDomain {
                var: self.variables[v].name.clone(),
                value: x.to_string(),
            });
        }
        Ok(())
    }

    pub fn validate_assignment(&self, s: &Assignment) -> Result<(), ProblemError> {
        for (v, x) in s.iter() {
            self.check_binding(v, x)?;
        }
        Ok(())
    }

    /// The restriction of this problem to `v = x`: `v` disappears, and every
    /// constraint mentioning it is projected onto the tuples with `v = x`.
    /// Remaining variables are renumbered densely, preserving order.
    pub fn restrict(&self, v: VarId, x: &Value) -> Result<Swcsp, ProblemError> {
        self.check_binding(v, x)?;
        let map: Vec<Option<VarId>> = (0..self.size())
            .map(|u| match u.cmp(&v) {
                std::cmp::Ordering::Less => Some(u),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(u - 1),
            })
            .collect();

        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                if !c.mentions(v) {
                    return c.remap(&map);
                }
                match c {
                    Constraint::Table { scope, allowed } => {
                        let at = scope.iter().position(|&u| u == v).unwrap();
                        let projected = allowed
                            .iter()
                            .filter(|t| &t[at] == x)
                            .map(|t| {
                                let mut t = t.clone();
                                t.remove(at);
                                t
                            })
                            .collect();
                        Constraint::Table {
                            scope: scope.iter().filter(|&&u| u != v).map(|&u| map[u].unwrap()).collect(),
                            allowed: projected,
                        }
                    }
                    Constraint::Crossing { vars, positions } => {
                        let (mine, other, other_pos) = if vars[0] == v {
                            (positions[0], vars[1], positions[1])
                        } else {
                            (positions[1], vars[0], positions[0])
                        };
                        match x.letter(mine) {
                            Some(letter) => Constraint::LetterAt {
                                var: map[other].unwrap(),
                                position: other_pos,
                                letter,
                            },
                            None => Constraint::Table {
                                scope: Vec::new(),
                                allowed: BTreeSet::new(),
                            },
                        }
                    }
                    Constraint::LetterAt { position, letter, .. } => {
                        let mut allowed = BTreeSet::new();
                        if x.letter(*position) == Some(*letter) {
                            allowed.insert(Vec::new());
                        }
                        Constraint::Table {
                            scope: Vec::new(),
                            allowed,
                        }
                    }
                }
            })
            .collect();

        let keep: Vec<VarId> = (0..self.size()).filter(|&u| u != v).collect();
        Ok(self.rebuild(&keep, constraints))
    }

    /// Restrict to every binding of `s`. Bindings are applied in descending
    /// id order so earlier ids stay valid; the result is order independent.
    pub fn restrict_all(&self, s: &Assignment) -> Result<Swcsp, ProblemError> {
        if s.is_inconsistent() {
            return Err(ProblemError::Inconsistent);
        }
        self.validate_assignment(s)?;
        let mut out = self.clone();
        for (v, x) in s.iter().collect::<Vec<_>>().into_iter().rev() {
            out = out.restrict(v, x)?;
        }
        Ok(out)
    }

    /// Apply bindings in the given order, translating ids as variables
    /// disappear. Used to check order independence.
    pub fn restrict_in_order(&self, bindings: &[(VarId, Value)]) -> Result<Swcsp, ProblemError> {
        let mut out = self.clone();
        let mut alive: Vec<VarId> = (0..self.size()).collect();
        for (v, x) in bindings {
            let local = alive
                .iter()
                .position(|u| u == v)
                .ok_or(ProblemError::UnknownVariableId(*v))?;
            out = out.restrict(local, x)?;
            alive.remove(local);
        }
        Ok(out)
    }

    fn rebuild(&self, keep: &[VarId], constraints: Vec<Constraint>) -> Swcsp {
        Swcsp {
            variables: keep
                .iter()
                .enumerate()
                .map(|(id, &u)| Variable {
                    id,
                    name: self.variables[u].name.clone(),
                })
                .collect(),
            domains: keep.iter().map(|&u| self.domains[u].clone()).collect(),
            soft: keep.iter().map(|&u| self.soft[u].clone()).collect(),
            source: self.source.clone(),
            source_ids: keep.iter().map(|&u| self.source_ids[u]).collect(),
            constraints,
            incidence: Vec::new(),
            adjacency: Vec::new(),
        }
        .reindexed()
    }

    /// Constraints sorted into a canonical order.
    pub fn canonical_constraints(&self) -> Vec<Constraint> {
        let mut cs = self.constraints.clone();
        cs.sort();
        cs
    }

    /// Variables consistent with every constraint whose other variables are
    /// all bound, together with their costs.
    fn consistent_candidates(&self, v: VarId, s: &Assignment) -> Vec<Candidate> {
        let base = match self.pattern_for(v, s) {
            Some(pattern) => self.pattern_candidates(v, &pattern),
            None => self.candidates(v),
        };
        base.into_iter()
            .filter(|cand| {
                self.incidence[v].iter().all(|&ci| {
                    self.constraints[ci]
                        .check(|u| if u == v { Some(&cand.value) } else { s.get(u) })
                        .unwrap_or(true)
                })
            })
            .collect()
    }

    /// Lower bound on the cost of any extension of `s`: exact costs of bound
    /// variables plus, for each unbound variable, the cheapest value still
    /// consistent with the bound ones. `+inf` for the inconsistent assignment,
    /// for an assignment violating a fully bound constraint, or when some
    /// unbound variable has no consistent value left.
    pub fn cost(&self, s: &Assignment) -> Result<f64, ProblemError> {
        if s.is_inconsistent() {
            return Ok(f64::INFINITY);
        }
        self.validate_assignment(s)?;
        if self.constraints.iter().any(|c| c.check(|u| s.get(u)) == Some(false)) {
            return Ok(f64::INFINITY);
        }
        let mut total = 0.0;
        for v in 0..self.size() {
            match s.get(v) {
                Some(x) => total += self.value_cost(v, x),
                None => {
                    let best = self
                        .consistent_candidates(v, s)
                        .iter()
                        .map(|c| c.cost)
                        .fold(f64::INFINITY, f64::min);
                    total += best;
                }
            }
        }
        Ok(total)
    }

    /// True iff `s` binds every variable to a domain member and satisfies
    /// every hard constraint.
    pub fn is_solution(&self, s: &Assignment) -> bool {
        if s.is_inconsistent() || s.len() != self.size() {
            return false;
        }
        if self.validate_assignment(s).is_err() {
            return false;
        }
        self.constraints.iter().all(|c| c.check(|u| s.get(u)) == Some(true))
    }

    /// Connected components of the constraint hypergraph, each sorted, in
    /// order of their smallest variable.
    pub fn components(&self) -> Vec<Vec<VarId>> {
        components_of(self, &(0..self.size()).collect::<Vec<_>>(), |_| true)
    }

    /// If the constraint graph is disconnected, the variables of the
    /// component holding variable 0 and the variables of everything else.
    pub fn split_vars(&self) -> Option<(Vec<VarId>, Vec<VarId>)> {
        let comps = self.components();
        if comps.len() < 2 {
            return None;
        }
        let first = comps[0].clone();
        let mut rest: Vec<VarId> = comps[1..].iter().flatten().copied().collect();
        rest.sort_unstable();
        Some((first, rest))
    }

    /// Binary split: one connected component against the remainder.
    pub fn split(&self) -> Option<(Swcsp, Swcsp)> {
        let (a, b) = self.split_vars()?;
        Some((self.subproblem(&a), self.subproblem(&b)))
    }

    /// The problem induced by `vars` (sorted ascending). Constraints must
    /// not straddle `vars` and its complement.
    pub fn subproblem(&self, vars: &[VarId]) -> Swcsp {
        let mut map = vec![None; self.size()];
        for (i, &v) in vars.iter().enumerate() {
            map[v] = Some(i);
        }
        let constraints = self
            .constraints
            .iter()
            .filter(|c| c.scope().first().is_some_and(|&v| map[v].is_some()))
            .map(|c| c.remap(&map))
            .collect();
        self.rebuild(vars, constraints)
    }

    /// Translate an assignment of `self.subproblem(vars)` back to ids of `self`.
    pub fn lift(&self, vars: &[VarId], sub: &Assignment) -> Assignment {
        match sub {
            Assignment::Inconsistent => Assignment::Inconsistent,
            Assignment::Bindings(b) => Assignment::Bindings(b.iter().map(|(&i, x)| (vars[i], x.clone())).collect()),
        }
    }
}

/// Connected components among `vars`, where a constraint links the members
/// of its scope that satisfy `live`.
pub(crate) fn components_of(problem: &Swcsp, vars: &[VarId], live: impl Fn(VarId) -> bool) -> Vec<Vec<VarId>> {
    let n = problem.size();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut member = vec![false; n];
    for &v in vars {
        member[v] = live(v);
    }
    for c in problem.constraints() {
        let scope: Vec<VarId> = c.scope().into_iter().filter(|&v| member[v]).collect();
        for w in scope.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<VarId>> = BTreeMap::new();
    let mut order: Vec<VarId> = vars.iter().copied().filter(|&v| member[v]).collect();
    order.sort_unstable();
    for v in order {
        let root = find(&mut parent, v);
        groups.entry(root).or_default().push(v);
    }
    let mut out: Vec<Vec<VarId>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}

/// The unique string matching a fully fixed pattern.
pub fn forced_string(pattern: &[Option<u8>]) -> Option<Value> {
    let bytes: Option<Vec<u8>> = pattern.iter().copied().collect();
    bytes.and_then(|b| String::from_utf8(b).ok()).map(Value::from)
}

/// Partial map from variables to values, or the inconsistent assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assignment {
    Bindings(BTreeMap<VarId, Value>),
    Inconsistent,
}

impl Default for Assignment {
    fn default() -> Self {
        Assignment::Bindings(BTreeMap::new())
    }
}

impl Assignment {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (VarId, V)>,
        V: Into<Value>,
    {
        Assignment::Bindings(pairs.into_iter().map(|(v, x)| (v, x.into())).collect())
    }

    pub fn is_inconsistent(&self) -> bool {
        matches!(self, Assignment::Inconsistent)
    }

    pub fn get(&self, v: VarId) -> Option<&Value> {
        match self {
            Assignment::Bindings(b) => b.get(&v),
            Assignment::Inconsistent => None,
        }
    }

    pub fn is_bound(&self, v: VarId) -> bool {
        self.get(v).is_some()
    }

    /// Bind `v` to `x`. Binding into the inconsistent assignment is a no-op.
    pub fn bind(&mut self, v: VarId, x: Value) {
        if let Assignment::Bindings(b) = self {
            b.insert(v, x);
        }
    }

    pub fn unbind(&mut self, v: VarId) {
        if let Assignment::Bindings(b) = self {
            b.remove(&v);
        }
    }

    pub fn with(&self, v: VarId, x: Value) -> Self {
        let mut out = self.clone();
        out.bind(v, x);
        out
    }

    pub fn len(&self) -> usize {
        match self {
            Assignment::Bindings(b) => b.len(),
            Assignment::Inconsistent => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &Value)> {
        let inner = match self {
            Assignment::Bindings(b) => Some(b.iter().map(|(&v, x)| (v, x))),
            Assignment::Inconsistent => None,
        };
        inner.into_iter().flatten()
    }

    /// Bindings restricted to `vars`.
    pub fn project(&self, vars: &[VarId]) -> Assignment {
        match self {
            Assignment::Inconsistent => Assignment::Inconsistent,
            Assignment::Bindings(b) => {
                Assignment::Bindings(vars.iter().filter_map(|v| b.get(v).map(|x| (*v, x.clone()))).collect())
            }
        }
    }

    /// Union of two assignments; inconsistent if either is, or if they
    /// disagree on a shared variable.
    pub fn union(&self, other: &Assignment) -> Assignment {
        match (self, other) {
            (Assignment::Bindings(a), Assignment::Bindings(b)) => {
                let mut out = a.clone();
                for (v, x) in b {
                    if let Some(prev) = out.insert(*v, x.clone()) {
                        if &prev != x {
                            return Assignment::Inconsistent;
                        }
                    }
                }
                Assignment::Bindings(out)
            }
            _ => Assignment::Inconsistent,
        }
    }
}
