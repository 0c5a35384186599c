use std::ops::Range;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::IlpBuilder;
use crate::model::Constraint;

/// The `b` side of a power gadget: a variable or a fixed value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Var(usize),
    Const(BigInt),
}

/// What [`power_gadget`] emitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetHandle {
    /// Indices of the emitted constraints in the builder.
    pub constraints: Range<usize>,
    pub a: usize,
    pub b: Operand,
    pub p: usize,
    /// Binary digits `p₀ … p_{ℓ−1}` of `p`.
    pub bits: Vec<usize>,
    /// Partial products `a₀ … a_{ℓ−2}`.
    pub partials: Vec<usize>,
    pub ell: u32,
    pub big_m: BigInt,
}

impl GadgetHandle {
    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_aux(&self) -> usize {
        self.bits.len() + self.partials.len()
    }
}

/// Number of binary digits used for `p ∈ {0..p_max}`, at least 1.
pub fn power_bits(p_max: u32) -> u32 {
    (u32::BITS - p_max.leading_zeros()).max(1)
}

/// The big-M coefficient `b_max·2^(2^ℓ−1) + 1`. It exceeds
/// `(2^(2^j) − 1)·a_{j−1}` for every partial product, which the switching
/// constraints need.
pub fn power_big_m(b_max: &BigInt, p_max: u32) -> BigInt {
    let ell = power_bits(p_max);
    (b_max << ((1usize << ell) - 1)) + 1
}

/// Appends constraints forcing `0 ≤ b ≤ b_max`, `0 ≤ p ≤ p_max` and
/// `a = b·2^p` in every integer solution.
///
/// With `ℓ` digits this is `6ℓ+7` constraints over `2ℓ−1` new variables:
/// six range constraints, `2ℓ` digit ranges, `p = Σ 2^i pᵢ`, and for each
/// digit `j` four constraints forcing `a_j = 2^(2^j·p_j)·a_{j−1}` (with
/// `a_{−1} = b`, `a_{ℓ−1} = a`). With `b_max = 0` it is just `a = 0`,
/// `b = 0`, `0 ≤ p ≤ p_max`.
pub fn power_gadget(
    builder: &mut IlpBuilder,
    a: usize,
    b: Operand,
    b_max: &BigInt,
    p: usize,
    p_max: u32,
) -> GadgetHandle {
    emit(builder, a, b, b_max, p, p_max, None)
}

/// [`power_gadget`] reusing digit variables of `p` created elsewhere (whose
/// ranges and decomposition are already constrained). Emits `4ℓ+6`
/// constraints and `ℓ−1` variables.
pub fn power_gadget_shared(
    builder: &mut IlpBuilder,
    a: usize,
    b: Operand,
    b_max: &BigInt,
    p: usize,
    p_max: u32,
    bits: &[usize],
) -> GadgetHandle {
    assert_eq!(bits.len() as u32, power_bits(p_max), "digit count");
    emit(builder, a, b, b_max, p, p_max, Some(bits))
}

/// `Σ terms + coef·b`, folding a constant `b` into the right-hand side.
fn with_b(
    mut terms: Vec<(usize, BigInt)>,
    b: &Operand,
    coef: BigInt,
    rhs: BigInt,
) -> (Vec<(usize, BigInt)>, BigInt) {
    match b {
        Operand::Var(v) => {
            terms.push((*v, coef));
            (terms, rhs)
        }
        Operand::Const(c) => (terms, rhs - coef * c),
    }
}

fn emit(
    builder: &mut IlpBuilder,
    a: usize,
    b: Operand,
    b_max: &BigInt,
    p: usize,
    p_max: u32,
    shared: Option<&[usize]>,
) -> GadgetHandle {
    let start = builder.num_constraints();
    let one = BigInt::one;
    let neg = || -BigInt::one();
    let zero = BigInt::zero;

    if b_max.is_zero() {
        builder.push(Constraint::eq([(a, 1)], 0));
        let (t, r) = with_b(vec![], &b, one(), zero());
        builder.push(Constraint::eq(t, r));
        builder.push(Constraint::ge([(p, 1)], 0));
        builder.push(Constraint::le([(p, 1)], p_max));
        return GadgetHandle {
            constraints: start..builder.num_constraints(),
            a,
            b,
            p,
            bits: vec![],
            partials: vec![],
            ell: 0,
            big_m: BigInt::one(),
        };
    }

    let ell = power_bits(p_max);
    let big_m = power_big_m(b_max, p_max);
    let a_max = b_max << p_max;

    let (t, r) = with_b(vec![], &b, one(), zero());
    builder.push(Constraint::ge(t, r));
    builder.push(Constraint::ge([(p, 1)], 0));
    builder.push(Constraint::ge([(a, 1)], 0));
    let (t, r) = with_b(vec![], &b, one(), b_max.clone());
    builder.push(Constraint::le(t, r));
    builder.push(Constraint::le([(p, 1)], p_max));
    builder.push(Constraint::le([(a, 1)], a_max.clone()));

    let tag = format!("pow@{start}");
    let bits: Vec<usize> = match shared {
        Some(bits) => bits.to_vec(),
        None => {
            let bits: Vec<usize> = (0..ell)
                .map(|i| builder.var(format!("{tag}.p{i}"), 0, 1))
                .collect();
            for &v in &bits {
                builder.push(Constraint::ge([(v, 1)], 0));
                builder.push(Constraint::le([(v, 1)], 1));
            }
            let mut terms = vec![(p, one())];
            terms.extend(
                bits.iter()
                    .enumerate()
                    .map(|(i, &v)| (v, -(BigInt::one() << i))),
            );
            builder.push(Constraint::eq(terms, 0));
            bits
        }
    };
    let partials: Vec<usize> = (0..ell - 1)
        .map(|j| builder.var(format!("{tag}.a{j}"), 0, a_max.clone()))
        .collect();

    for j in 0..ell as usize {
        let cur = if j + 1 == ell as usize {
            a
        } else {
            partials[j]
        };
        let prev = if j == 0 {
            b.clone()
        } else {
            Operand::Var(partials[j - 1])
        };
        let pow = BigInt::one() << (1usize << j);
        let pj = bits[j];
        // a_j ≥ a_{j−1}
        let (t, r) = with_b(vec![(cur, one())], &prev, neg(), zero());
        builder.push(Constraint::ge(t, r));
        // a_j ≤ 2^(2^j)·a_{j−1}
        let (t, r) = with_b(vec![(cur, one())], &prev, -&pow, zero());
        builder.push(Constraint::le(t, r));
        // a_j + M − M·p_j ≥ 2^(2^j)·a_{j−1}
        let (t, r) = with_b(vec![(cur, one()), (pj, -&big_m)], &prev, -&pow, -&big_m);
        builder.push(Constraint::ge(t, r));
        // a_j ≤ a_{j−1} + M·p_j
        let (t, r) = with_b(vec![(cur, one()), (pj, -&big_m)], &prev, neg(), zero());
        builder.push(Constraint::le(t, r));
    }

    GadgetHandle {
        constraints: start..builder.num_constraints(),
        a,
        b,
        p,
        bits,
        partials,
        ell,
        big_m,
    }
}
