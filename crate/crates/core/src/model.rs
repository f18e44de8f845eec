//! Mechanism instances on finite type spaces.
//!
//! Agents and types are addressed by 0-based indices. A joint allocation for
//! `n` agents over `m` coordinates is a vector of length `m * n` whose agent-`i`
//! block is `[i * m, (i + 1) * m)`. Profiles are enumerated in lexicographic
//! order with agent 0 most significant.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::{dot, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeVector(pub Vec<Rational>);

impl TypeVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }
}

impl From<Vec<Rational>> for TypeVector {
    fn from(v: Vec<Rational>) -> Self {
        TypeVector(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentTypeSpace {
    pub types: Vec<TypeVector>,
    pub labels: Option<Vec<String>>,
}

impl AgentTypeSpace {
    pub fn new(types: Vec<TypeVector>) -> Self {
        AgentTypeSpace {
            types,
            labels: None,
        }
    }

    pub fn labeled(types: Vec<TypeVector>, labels: Vec<String>) -> Self {
        AgentTypeSpace {
            types,
            labels: Some(labels),
        }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn label(&self, t: usize) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.get(t).cloned())
            .unwrap_or_else(|| format!("#{t}"))
    }

    pub fn position(&self, v: &TypeVector) -> Option<usize> {
        self.types.iter().position(|t| t == v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JointAllocation(pub Vec<Rational>);

impl JointAllocation {
    pub fn zeros(len: usize) -> Self {
        JointAllocation(vec![Rational::zero(); len])
    }

    pub fn block(&self, agent: usize, m: usize) -> &[Rational] {
        &self.0[agent * m..(agent + 1) * m]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    /// Copy of `self` with agent `agent`'s block taken from `donor`.
    pub fn with_block(&self, agent: usize, m: usize, donor: &[Rational]) -> Self {
        let mut out = self.clone();
        out.0[agent * m..(agent + 1) * m].clone_from_slice(donor);
        out
    }
}

/// Explicit finite set of feasible joint allocations.
#[derive(Debug, Clone)]
pub struct FeasibleSet {
    pub m: usize,
    pub agents: usize,
    allocations: Vec<JointAllocation>,
    index: HashMap<JointAllocation, usize>,
}

impl FeasibleSet {
    /// Builds the set, keeping the first occurrence of repeated members.
    pub fn dedup(
        m: usize,
        agents: usize,
        allocations: impl IntoIterator<Item = JointAllocation>,
    ) -> Self {
        let mut set = FeasibleSet {
            m,
            agents,
            allocations: Vec::new(),
            index: HashMap::new(),
        };
        for a in allocations {
            set.insert(a);
        }
        set
    }

    /// Builds the set as given; duplicates are kept and reported by
    /// [`validate_instance`].
    pub fn from_list(m: usize, agents: usize, allocations: Vec<JointAllocation>) -> Self {
        let mut index = HashMap::new();
        for (i, a) in allocations.iter().enumerate() {
            index.entry(a.clone()).or_insert(i);
        }
        FeasibleSet {
            m,
            agents,
            allocations,
            index,
        }
    }

    /// Inserts if absent; returns the member's index either way.
    pub fn insert(&mut self, a: JointAllocation) -> usize {
        if let Some(&i) = self.index.get(&a) {
            return i;
        }
        let i = self.allocations.len();
        self.index.insert(a.clone(), i);
        self.allocations.push(a);
        i
    }

    pub fn len(&self) -> usize {
        self.allocations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allocations.is_empty()
    }

    pub fn get(&self, i: usize) -> &JointAllocation {
        &self.allocations[i]
    }

    pub fn allocations(&self) -> &[JointAllocation] {
        &self.allocations
    }

    pub fn index_of(&self, a: &JointAllocation) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn contains(&self, a: &JointAllocation) -> bool {
        self.index.contains_key(a)
    }

    pub fn block(&self, f: usize, agent: usize) -> &[Rational] {
        self.allocations[f].block(agent, self.m)
    }

    pub fn zero_index(&self) -> Option<usize> {
        self.index_of(&JointAllocation::zeros(self.m * self.agents))
    }
}

impl PartialEq for FeasibleSet {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.agents == other.agents && self.allocations == other.allocations
    }
}

impl Eq for FeasibleSet {}

/// Sparse distribution over feasible-set indices, sorted by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AllocationDistribution(Vec<(usize, Rational)>);

impl AllocationDistribution {
    pub fn point(f: usize) -> Self {
        AllocationDistribution(vec![(f, Rational::from_integer(1))])
    }

    /// Merges repeated indices and drops zero weights. Performs no further
    /// validation; see [`validate_instance`].
    pub fn from_weights(weights: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut v: Vec<(usize, Rational)> = weights.into_iter().collect();
        v.sort_by_key(|(f, _)| *f);
        let mut out: Vec<(usize, Rational)> = Vec::with_capacity(v.len());
        for (f, w) in v {
            match out.last_mut() {
                Some((g, acc)) if *g == f => *acc += w,
                _ => out.push((f, w)),
            }
        }
        out.retain(|(_, w)| !w.is_zero());
        AllocationDistribution(out)
    }

    /// Like [`from_weights`](Self::from_weights) but keeps entries verbatim.
    pub fn raw(entries: Vec<(usize, Rational)>) -> Self {
        AllocationDistribution(entries)
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.0
    }

    pub fn deterministic(&self) -> Option<usize> {
        match self.0.as_slice() {
            [(f, w)] if *w == Rational::from_integer(1) => Some(*f),
            _ => None,
        }
    }

    /// Expected agent block under this distribution.
    pub fn expected_block(&self, feasible: &FeasibleSet, agent: usize) -> Vec<Rational> {
        let mut acc = vec![Rational::zero(); feasible.m];
        for (f, w) in &self.0 {
            for (a, x) in acc.iter_mut().zip(feasible.block(*f, agent)) {
                if !x.is_zero() {
                    *a += w * x;
                }
            }
        }
        acc
    }

    /// `E<valuation, x_agent>`.
    pub fn value(&self, feasible: &FeasibleSet, agent: usize, valuation: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (f, w) in &self.0 {
            let v = dot(valuation, feasible.block(*f, agent));
            if !v.is_zero() {
                acc += w * v;
            }
        }
        acc
    }
}

/// Mixed-radix enumeration of joint profiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileSpace {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl ProfileSpace {
    pub fn new(sizes: Vec<usize>) -> Self {
        let mut strides = vec![1; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        let total = sizes.iter().product();
        ProfileSpace {
            sizes,
            strides,
            total,
        }
    }

    pub fn agents(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.strides).map(|(t, s)| t * s).sum()
    }

    pub fn try_index(&self, profile: &[usize]) -> Option<usize> {
        if profile.len() != self.sizes.len() || profile.iter().zip(&self.sizes).any(|(t, n)| t >= n)
        {
            return None;
        }
        Some(self.index(profile))
    }

    pub fn profile(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for (o, s) in out.iter_mut().zip(&self.strides) {
            *o = idx / s;
            idx %= s;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.total).map(|i| self.profile(i))
    }

    /// Index of the profile obtained by setting `agent`'s entry to `t`.
    pub fn with_type(&self, idx: usize, agent: usize, t: usize) -> usize {
        let cur = (idx / self.strides[agent]) % self.sizes[agent];
        idx - cur * self.strides[agent] + t * self.strides[agent]
    }

    /// Opponent profiles of `agent` (entries of the other agents, in agent
    /// order), lexicographically.
    pub fn opponents(&self, agent: usize) -> ProfileSpace {
        let sizes = self
            .sizes
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != agent)
            .map(|(_, n)| *n)
            .collect();
        ProfileSpace::new(sizes)
    }

    /// Full profile index from an agent's own type and an opponent profile.
    pub fn join(&self, agent: usize, own: usize, opponents: &[usize]) -> usize {
        let mut idx = 0;
        let mut k = 0;
        for j in 0..self.sizes.len() {
            let t = if j == agent {
                own
            } else {
                k += 1;
                opponents[k - 1]
            };
            idx += t * self.strides[j];
        }
        idx
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationRule {
    /// Indexed by profile index.
    pub entries: Vec<AllocationDistribution>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaymentRule {
    /// Indexed by profile index; one payment per agent.
    pub entries: Vec<Vec<Rational>>,
}

impl PaymentRule {
    pub fn zeros(profiles: usize, agents: usize) -> Self {
        PaymentRule {
            entries: vec![vec![Rational::zero(); agents]; profiles],
        }
    }

    pub fn get(&self, profile: usize, agent: usize) -> &Rational {
        &self.entries[profile][agent]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MechanismInstance {
    pub m: usize,
    pub typespaces: Vec<AgentTypeSpace>,
    pub feasible: FeasibleSet,
    pub allocation: AllocationRule,
    pub payments: Option<PaymentRule>,
}

impl MechanismInstance {
    pub fn agents(&self) -> usize {
        self.typespaces.len()
    }

    pub fn profiles(&self) -> ProfileSpace {
        ProfileSpace::new(self.typespaces.iter().map(AgentTypeSpace::len).collect())
    }

    pub fn type_vector(&self, agent: usize, t: usize) -> &TypeVector {
        &self.typespaces[agent].types[t]
    }

    pub fn dist(&self, profile: usize) -> &AllocationDistribution {
        &self.allocation.entries[profile]
    }

    pub fn with_payments(mut self, payments: PaymentRule) -> Self {
        self.payments = Some(payments);
        self
    }

    /// Human-readable profile, using type labels when present.
    pub fn profile_label(&self, profile: &[usize]) -> String {
        let parts: Vec<String> = profile
            .iter()
            .enumerate()
            .map(|(i, t)| self.typespaces[i].label(*t))
            .collect();
        format!("({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoAgents,
    ZeroDimension,
    EmptyTypeSpace {
        agent: usize,
    },
    TypeDimension {
        agent: usize,
        t: usize,
        found: usize,
    },
    NegativeTypeCoordinate {
        agent: usize,
        t: usize,
        coord: usize,
    },
    DuplicateType {
        agent: usize,
        first: usize,
        second: usize,
    },
    LabelCount {
        agent: usize,
    },
    FeasibleDims {
        expected_m: usize,
        expected_agents: usize,
    },
    EmptyFeasibleSet,
    AllocationLength {
        f: usize,
        found: usize,
    },
    NegativeAllocation {
        f: usize,
        coord: usize,
    },
    DuplicateAllocation {
        first: usize,
        second: usize,
    },
    ProfileCount {
        expected: usize,
        found: usize,
    },
    EmptyDistribution {
        profile: usize,
    },
    FeasibleIndexOutOfRange {
        profile: usize,
        f: usize,
    },
    NonPositiveProbability {
        profile: usize,
        f: usize,
        weight: Rational,
    },
    RepeatedIndex {
        profile: usize,
        f: usize,
    },
    WeightsDoNotSumToOne {
        profile: usize,
        sum: Rational,
    },
    PaymentCount {
        expected: usize,
        found: usize,
    },
    PaymentArity {
        profile: usize,
        found: usize,
    },
    NegativePayment {
        profile: usize,
        agent: usize,
        value: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoAgents => write!(f, "instance has no agents"),
            ZeroDimension => write!(f, "type dimension m must be positive"),
            EmptyTypeSpace { agent } => write!(f, "agent {agent} has an empty type space"),
            TypeDimension { agent, t, found } => {
                write!(f, "agent {agent} type {t} has {found} coordinates")
            }
            NegativeTypeCoordinate { agent, t, coord } => {
                write!(f, "agent {agent} type {t} coordinate {coord} is negative")
            }
            DuplicateType { agent, first, second } => {
                write!(f, "agent {agent} types {first} and {second} coincide")
            }
            LabelCount { agent } => write!(f, "agent {agent} label count differs from type count"),
            FeasibleDims { expected_m, expected_agents } => write!(
                f,
                "feasible set dimensions differ from instance (m={expected_m}, agents={expected_agents})"
            ),
            EmptyFeasibleSet => write!(f, "feasible set is empty"),
            AllocationLength { f: i, found } => write!(f, "feasible allocation {i} has length {found}"),
            NegativeAllocation { f: i, coord } => {
                write!(f, "feasible allocation {i} coordinate {coord} is negative")
            }
            DuplicateAllocation { first, second } => {
                write!(f, "feasible allocations {first} and {second} coincide")
            }
            ProfileCount { expected, found } => {
                write!(f, "allocation rule has {found} entries, expected {expected}")
            }
            EmptyDistribution { profile } => write!(f, "profile {profile} has an empty distribution"),
            FeasibleIndexOutOfRange { profile, f: i } => {
                write!(f, "profile {profile} references feasible index {i} out of range")
            }
            NonPositiveProbability { profile, f: i, weight } => {
                if weight.is_negative() {
                    write!(f, "negative probability {weight} on feasible index {i} at profile {profile}")
                } else {
                    write!(f, "zero probability on feasible index {i} at profile {profile}")
                }
            }
            RepeatedIndex { profile, f: i } => {
                write!(f, "profile {profile} lists feasible index {i} twice")
            }
            WeightsDoNotSumToOne { profile, sum } => {
                write!(f, "weights at profile {profile} sum to {sum}, not 1")
            }
            PaymentCount { expected, found } => {
                write!(f, "payment rule has {found} entries, expected {expected}")
            }
            PaymentArity { profile, found } => {
                write!(f, "payment entry at profile {profile} has {found} values")
            }
            NegativePayment { profile, agent, value } => {
                write!(f, "negative payment {value} for agent {agent} at profile {profile}")
            }
        }
    }
}

/// Checks every structural invariant of an instance.
pub fn validate_instance(inst: &MechanismInstance) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let n = inst.agents();
    if n == 0 {
        out.push(Violation::NoAgents);
    }
    if inst.m == 0 {
        out.push(Violation::ZeroDimension);
    }
    for (agent, space) in inst.typespaces.iter().enumerate() {
        if space.is_empty() {
            out.push(Violation::EmptyTypeSpace { agent });
        }
        if let Some(labels) = &space.labels {
            if labels.len() != space.len() {
                out.push(Violation::LabelCount { agent });
            }
        }
        for (t, v) in space.types.iter().enumerate() {
            if v.dim() != inst.m {
                out.push(Violation::TypeDimension {
                    agent,
                    t,
                    found: v.dim(),
                });
            }
            if let Some(coord) = v.0.iter().position(Rational::is_negative) {
                out.push(Violation::NegativeTypeCoordinate { agent, t, coord });
            }
            if let Some(first) = space.types[..t].iter().position(|u| u == v) {
                out.push(Violation::DuplicateType {
                    agent,
                    first,
                    second: t,
                });
            }
        }
    }

    let fs = &inst.feasible;
    if fs.m != inst.m || fs.agents != n {
        out.push(Violation::FeasibleDims {
            expected_m: inst.m,
            expected_agents: n,
        });
    }
    if fs.is_empty() {
        out.push(Violation::EmptyFeasibleSet);
    }
    for (i, a) in fs.allocations().iter().enumerate() {
        if a.0.len() != inst.m * n {
            out.push(Violation::AllocationLength {
                f: i,
                found: a.0.len(),
            });
        }
        if let Some(coord) = a.0.iter().position(Rational::is_negative) {
            out.push(Violation::NegativeAllocation { f: i, coord });
        }
        let first = fs.index_of(a).unwrap_or(i);
        if first != i {
            out.push(Violation::DuplicateAllocation { first, second: i });
        }
    }

    let expected = inst.profiles().len();
    if inst.allocation.entries.len() != expected {
        out.push(Violation::ProfileCount {
            expected,
            found: inst.allocation.entries.len(),
        });
    }
    let one = Rational::from_integer(1);
    for (profile, d) in inst.allocation.entries.iter().enumerate() {
        if d.entries().is_empty() {
            out.push(Violation::EmptyDistribution { profile });
            continue;
        }
        let mut sum = Rational::zero();
        let mut seen = Vec::new();
        for (f, w) in d.entries() {
            if *f >= fs.len() {
                out.push(Violation::FeasibleIndexOutOfRange { profile, f: *f });
            }
            if !w.is_positive() {
                out.push(Violation::NonPositiveProbability {
                    profile,
                    f: *f,
                    weight: w.clone(),
                });
            }
            if seen.contains(f) {
                out.push(Violation::RepeatedIndex { profile, f: *f });
            }
            seen.push(*f);
            sum += w;
        }
        if sum != one {
            out.push(Violation::WeightsDoNotSumToOne { profile, sum });
        }
    }

    if let Some(p) = &inst.payments {
        if p.entries.len() != expected {
            out.push(Violation::PaymentCount {
                expected,
                found: p.entries.len(),
            });
        }
        for (profile, pay) in p.entries.iter().enumerate() {
            if pay.len() != n {
                out.push(Violation::PaymentArity {
                    profile,
                    found: pay.len(),
                });
            }
            for (agent, value) in pay.iter().enumerate() {
                if value.is_negative() {
                    out.push(Violation::NegativePayment {
                        profile,
                        agent,
                        value: value.clone(),
                    });
                }
            }
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum ZeroSubstitution {
    /// The all-zero joint allocation is not a member.
    MissingZero,
    /// `allocation` restricted to `agent`'s block (zero elsewhere) is not a member.
    MissingProjection { allocation: usize, agent: usize },
}

/// Finite stand-in for downward closure: the all-zero allocation is feasible
/// and every member stays feasible after zeroing all blocks but one.
pub fn is_zero_substitutable(fs: &FeasibleSet) -> Result<(), ZeroSubstitution> {
    let zero = JointAllocation::zeros(fs.m * fs.agents);
    if !fs.contains(&zero) {
        return Err(ZeroSubstitution::MissingZero);
    }
    for (y, a) in fs.allocations().iter().enumerate() {
        for agent in 0..fs.agents {
            let projected = zero.with_block(agent, fs.m, a.block(agent, fs.m));
            if !fs.contains(&projected) {
                return Err(ZeroSubstitution::MissingProjection {
                    allocation: y,
                    agent,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn tv(v: &[i64]) -> TypeVector {
        TypeVector(v.iter().map(|x| qi(*x)).collect())
    }

    fn ja(v: &[i64]) -> JointAllocation {
        JointAllocation(v.iter().map(|x| qi(*x)).collect())
    }

    fn tiny() -> MechanismInstance {
        MechanismInstance {
            m: 1,
            typespaces: vec![AgentTypeSpace::new(vec![tv(&[1])])],
            feasible: FeasibleSet::dedup(1, 1, vec![ja(&[0]), ja(&[1])]),
            allocation: AllocationRule {
                entries: vec![AllocationDistribution::point(1)],
            },
            payments: None,
        }
    }

    #[test]
    fn profile_space_indexing() {
        let ps = ProfileSpace::new(vec![2, 3, 4]);
        assert_eq!(ps.len(), 24);
        for (i, p) in ps.iter().enumerate() {
            assert_eq!(ps.index(&p), i);
        }
        let idx = ps.index(&[1, 2, 3]);
        assert_eq!(ps.profile(ps.with_type(idx, 1, 0)), vec![1, 0, 3]);
        assert_eq!(ps.join(1, 2, &[1, 3]), idx);
        assert_eq!(ps.opponents(1).sizes(), &[2, 4]);
    }

    #[test]
    fn negative_probability_reported() {
        let mut inst = tiny();
        inst.allocation.entries[0] = AllocationDistribution::raw(vec![(0, q(3, 2)), (1, q(-1, 2))]);
        let v = validate_instance(&inst).unwrap_err();
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::NonPositiveProbability { .. })));
        assert!(v
            .iter()
            .any(|x| x.to_string().contains("negative probability")));
    }

    #[test]
    fn out_of_range_index_reported() {
        let mut inst = tiny();
        inst.allocation.entries[0] = AllocationDistribution::point(7);
        let v = validate_instance(&inst).unwrap_err();
        assert_eq!(
            v,
            vec![Violation::FeasibleIndexOutOfRange { profile: 0, f: 7 }]
        );
    }

    #[test]
    fn weights_must_sum_to_one() {
        let mut inst = tiny();
        inst.allocation.entries[0] = AllocationDistribution::raw(vec![(0, qi(1)), (1, qi(1))]);
        let v = validate_instance(&inst).unwrap_err();
        assert_eq!(
            v,
            vec![Violation::WeightsDoNotSumToOne {
                profile: 0,
                sum: qi(2)
            }]
        );
    }

    #[test]
    fn duplicate_members_and_types_reported() {
        let mut inst = tiny();
        inst.feasible = FeasibleSet::from_list(1, 1, vec![ja(&[0]), ja(&[1]), ja(&[0])]);
        inst.typespaces[0].types.push(tv(&[1]));
        inst.allocation
            .entries
            .push(AllocationDistribution::point(0));
        let v = validate_instance(&inst).unwrap_err();
        assert!(v.contains(&Violation::DuplicateAllocation {
            first: 0,
            second: 2
        }));
        assert!(v.contains(&Violation::DuplicateType {
            agent: 0,
            first: 0,
            second: 1
        }));
    }

    #[test]
    fn zero_substitutable_product_space() {
        let fs = FeasibleSet::dedup(
            1,
            2,
            vec![ja(&[0, 0]), ja(&[0, 1]), ja(&[1, 0]), ja(&[1, 1])],
        );
        assert_eq!(is_zero_substitutable(&fs), Ok(()));
        let only_zero = FeasibleSet::dedup(2, 1, vec![ja(&[0, 0])]);
        assert_eq!(is_zero_substitutable(&only_zero), Ok(()));
    }

    #[test]
    fn zero_substitution_counterexamples() {
        let fs = FeasibleSet::dedup(1, 2, vec![ja(&[1, 1])]);
        assert_eq!(
            is_zero_substitutable(&fs),
            Err(ZeroSubstitution::MissingZero)
        );
        let fs = FeasibleSet::dedup(1, 2, vec![ja(&[0, 0]), ja(&[1, 1]), ja(&[1, 0])]);
        assert_eq!(
            is_zero_substitutable(&fs),
            Err(ZeroSubstitution::MissingProjection {
                allocation: 1,
                agent: 1
            })
        );
    }

    #[test]
    fn distribution_merges_and_drops_zero() {
        let d = AllocationDistribution::from_weights(vec![
            (2, q(1, 2)),
            (0, qi(0)),
            (2, q(1, 4)),
            (1, q(1, 4)),
        ]);
        assert_eq!(d.entries(), &[(1, q(1, 4)), (2, q(3, 4))]);
    }
}
