// SPDX-License-Identifier: Apache-2.0

//! Full-adder count of every neuron's adder tree, the area objective.
//!
//! A neuron's summands are laid out as bit columns. Masked-out bits and
//! constant zeros are free. Each column of `c` live bits is compressed by
//! `floor(c / 3)` full adders per pass, each turning three bits into one
//! sum bit in place and one carry into the next column, until no column
//! holds more than two bits. The final carry-propagate adder is not part
//! of the estimate.

use serde::{Deserialize, Serialize};

use crate::netlist::acc_width;
use crate::qarith::{ApproxMlp, ApproxNeuron, MlpConfig};
use crate::Result;

/// Number of non-constant bits entering each column of a neuron's adder tree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnProfile {
    pub counts: Vec<u32>,
}

impl ColumnProfile {
    pub fn new(mut counts: Vec<u32>) -> Self {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        ColumnProfile { counts }
    }

    pub fn total_bits(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }
}

/// Column profile of one neuron.
///
/// Each set mask bit `p` of input `i` lands in column `p + k_i`, whatever the
/// sign, since negation only adds inverters. All constants (bias, the `+1` of
/// each negation and the ones padding an inverted word) are summed into one
/// word modulo `2^acc_width`; each of its one bits occupies a slot.
pub fn column_profile(neuron: &ApproxNeuron, w_act: u32) -> ColumnProfile {
    let width = acc_width(neuron, w_act);
    let all_ones = (1u128 << width) - 1;
    let mut counts = vec![0u32; width as usize];
    let mut constant = i128::from(neuron.bias);
    for (m, s, k) in neuron.summands() {
        if m == 0 {
            continue;
        }
        let placed = u128::from(m) << k;
        for (q, count) in counts.iter_mut().enumerate() {
            *count += (placed >> q & 1) as u32;
        }
        if s.is_negative() {
            // -v = ~v + 1; ~v's constant part is every bit outside `placed`.
            constant += ((all_ones ^ placed) + 1) as i128;
        }
    }
    let word = constant.rem_euclid(1i128 << width) as u128;
    for (q, count) in counts.iter_mut().enumerate() {
        *count += (word >> q & 1) as u32;
    }
    ColumnProfile::new(counts)
}

/// Full adders needed to bring every column down to at most two bits.
pub fn fa_count(profile: &ColumnProfile) -> u64 {
    let mut cols: Vec<u64> = profile.counts.iter().map(|&c| u64::from(c)).collect();
    let mut total = 0u64;
    while cols.iter().any(|&c| c > 2) {
        let mut next = cols.clone();
        next.push(0);
        for (q, &c) in cols.iter().enumerate() {
            let fas = c / 3;
            total += fas;
            next[q] -= 2 * fas;
            next[q + 1] += fas;
        }
        while next.last() == Some(&0) {
            next.pop();
        }
        cols = next;
    }
    total
}

pub fn neuron_area(neuron: &ApproxNeuron, w_act: u32) -> u64 {
    fa_count(&column_profile(neuron, w_act))
}

/// Sum of every neuron's reduction-tree full adders.
pub fn mlp_area(theta: &ApproxMlp) -> u64 {
    theta
        .neurons()
        .map(|(l, _, n)| neuron_area(n, theta.config.act_width(l)))
        .sum()
}

/// Area of the unpruned model: all-ones masks, weights `+1`, zero bias.
/// Reference point for hypervolume and area-reduction figures.
pub fn dense_area(topology: &[usize], config: &MlpConfig) -> Result<u64> {
    Ok(mlp_area(&ApproxMlp::dense(topology, config)?))
}
