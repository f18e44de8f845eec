use mexlab::model::{
    AgentTypeSpace, AllocationDistribution, AllocationRule, FeasibleSet, JointAllocation,
    MechanismInstance, ProfileSpace, TypeVector,
};
use mexlab::rational::dot;
use mexlab::Rational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

fn small<R: Rng>(rng: &mut R, max: i64) -> Rational {
    Rational::new(rng.gen_range(0..=max), rng.gen_range(1..=3))
}

/// `k` distinct non-negative vectors of dimension `m`.
pub fn random_types<R: Rng>(rng: &mut R, m: usize, k: usize) -> AgentTypeSpace {
    let mut types: Vec<TypeVector> = Vec::with_capacity(k);
    while types.len() < k {
        let t = TypeVector((0..m).map(|_| small(rng, 4)).collect());
        if !types.contains(&t) {
            types.push(t);
        }
    }
    AgentTypeSpace::new(types)
}

fn random_block<R: Rng>(rng: &mut R, m: usize) -> Vec<Rational> {
    (0..m)
        .map(|_| {
            if rng.gen_bool(0.3) {
                Rational::zero()
            } else {
                small(rng, 3)
            }
        })
        .collect()
}

/// Random members closed under keeping one agent's block and zeroing the rest.
pub fn random_zero_substitutable<R: Rng>(rng: &mut R, m: usize, agents: usize) -> FeasibleSet {
    let mut fs = FeasibleSet::from_list(m, agents, vec![JointAllocation::zeros(m * agents)]);
    for _ in 0..rng.gen_range(1..=4) {
        let a: Vec<Rational> = (0..agents).flat_map(|_| random_block(rng, m)).collect();
        let a = JointAllocation(a);
        for i in 0..agents {
            fs.insert(JointAllocation::zeros(m * agents).with_block(i, m, a.block(i, m)));
        }
        fs.insert(a);
    }
    fs
}

/// Product of per-agent block menus, so every agent can swap its block.
pub fn random_product<R: Rng>(rng: &mut R, m: usize, agents: usize) -> FeasibleSet {
    let menus: Vec<Vec<Vec<Rational>>> = (0..agents)
        .map(|_| {
            (0..rng.gen_range(1..=3))
                .map(|_| random_block(rng, m))
                .collect()
        })
        .collect();
    let mut joint: Vec<Vec<Rational>> = vec![Vec::new()];
    for menu in &menus {
        joint = joint
            .iter()
            .flat_map(|prefix| {
                menu.iter()
                    .map(move |b| [prefix.clone(), b.clone()].concat())
            })
            .collect();
    }
    FeasibleSet::dedup(m, agents, joint.into_iter().map(JointAllocation))
}

/// Weighted-welfare maximizer, lowest index on ties.
fn maximizer(
    fs: &FeasibleSet,
    typespaces: &[AgentTypeSpace],
    weights: &[Rational],
    profile: &[usize],
) -> usize {
    let score = |f: usize| -> Rational {
        profile
            .iter()
            .enumerate()
            .map(|(i, t)| &weights[i] * &dot(&typespaces[i].types[*t].0, fs.block(f, i)))
            .fold(Rational::zero(), |a, b| a + b)
    };
    let mut best = 0;
    let mut best_score = score(0);
    for f in 1..fs.len() {
        let s = score(f);
        if s > best_score {
            best = f;
            best_score = s;
        }
    }
    best
}

/// An implementable rule: a fixed-probability mixture of two weighted-welfare
/// maximizers, or a single one.
pub fn affine_maximizer<R: Rng>(
    rng: &mut R,
    fs: FeasibleSet,
    typespaces: Vec<AgentTypeSpace>,
) -> MechanismInstance {
    let n = typespaces.len();
    let w1: Vec<Rational> = (0..n)
        .map(|_| Rational::new(rng.gen_range(1..=4), 1))
        .collect();
    let w2: Vec<Rational> = (0..n)
        .map(|_| Rational::new(rng.gen_range(1..=4), 1))
        .collect();
    let mix = if rng.gen_bool(0.5) {
        Rational::new(1, 1)
    } else {
        Rational::new(rng.gen_range(1..=3), 4)
    };
    let space = ProfileSpace::new(typespaces.iter().map(AgentTypeSpace::len).collect());
    let entries = space
        .iter()
        .map(|p| {
            let a = maximizer(&fs, &typespaces, &w1, &p);
            let b = maximizer(&fs, &typespaces, &w2, &p);
            AllocationDistribution::from_weights([
                (a, mix.clone()),
                (b, Rational::new(1, 1) - &mix),
            ])
        })
        .collect();
    MechanismInstance {
        m: fs.m,
        typespaces,
        feasible: fs,
        allocation: AllocationRule { entries },
        payments: None,
    }
}

/// A rule drawn with no regard for incentives.
pub fn arbitrary_rule<R: Rng>(
    rng: &mut R,
    fs: FeasibleSet,
    typespaces: Vec<AgentTypeSpace>,
) -> MechanismInstance {
    let space = ProfileSpace::new(typespaces.iter().map(AgentTypeSpace::len).collect());
    let members: Vec<usize> = (0..fs.len()).collect();
    let entries = (0..space.len())
        .map(|_| {
            if rng.gen_bool(0.7) {
                AllocationDistribution::point(*members.choose(rng).unwrap())
            } else {
                let a = *members.choose(rng).unwrap();
                let b = *members.choose(rng).unwrap();
                AllocationDistribution::from_weights([
                    (a, Rational::new(1, 2)),
                    (b, Rational::new(1, 2)),
                ])
            }
        })
        .collect();
    MechanismInstance {
        m: fs.m,
        typespaces,
        feasible: fs,
        allocation: AllocationRule { entries },
        payments: None,
    }
}

pub fn typespaces<R: Rng>(
    rng: &mut R,
    m: usize,
    agents: usize,
    max_types: usize,
) -> Vec<AgentTypeSpace> {
    (0..agents)
        .map(|_| {
            let k = rng.gen_range(1..=max_types);
            random_types(rng, m, k)
        })
        .collect()
}
