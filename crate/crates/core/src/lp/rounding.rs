//! Randomized rounding of the MCSP relaxation.

use serde::{Deserialize, Serialize};

use super::model::LpSolution;
use crate::mcsp::{congestion_of_sets, Congestion, McspInstance, SetSelection};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Repair {
    /// Keep the raw draw, whatever its size.
    None,
    /// Drop or add sets until exactly `t` are chosen.
    TrimOrPad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingOutcome {
    /// Sets picked by the independent draws.
    pub drawn: Vec<usize>,
    pub congestion_drawn: Congestion,
    /// Final selection (equal to `drawn` without repair).
    pub selection: SetSelection,
    pub congestion_final: Congestion,
    pub repaired: bool,
}

/// Pick probability of a set with LP value `y`.
pub fn pick_probability(y: f64) -> f64 {
    (2.0 * y).clamp(0.0, 1.0)
}

/// Picks every set independently with probability `min(1, 2 y(X))`.
///
/// Trimming removes, one at a time, the chosen set whose elements carry the
/// largest total congestion (lowest index on ties); padding adds the
/// lowest-index unchosen sets.
pub fn round_mcsp(inst: &McspInstance, lp: &LpSolution, seed: u64, repair: Repair) -> RoundingOutcome {
    let n = inst.n_sets();
    let mut rng = SeededRng::new(seed);
    let drawn: Vec<usize> = (0..n)
        .filter(|&s| rng.uniform() < pick_probability(lp.values[s]))
        .collect();
    let congestion_drawn = congestion_of_sets(inst, &drawn);
    if repair == Repair::None || drawn.len() == inst.t {
        return RoundingOutcome {
            selection: SetSelection::new(drawn.clone()),
            congestion_final: congestion_drawn.clone(),
            drawn,
            congestion_drawn,
            repaired: false,
        };
    }

    let mut chosen = vec![false; n];
    drawn.iter().for_each(|&s| chosen[s] = true);
    let mut load = congestion_drawn.per_element.clone();
    let mut count = drawn.len();
    while count > inst.t {
        let worst = (0..n)
            .filter(|&s| chosen[s])
            .max_by(|&a, &b| {
                let la: usize = inst.sets[a].iter().map(|&e| load[e]).sum();
                let lb: usize = inst.sets[b].iter().map(|&e| load[e]).sum();
                la.cmp(&lb).then(b.cmp(&a))
            })
            .expect("count > t >= 1");
        chosen[worst] = false;
        inst.sets[worst].iter().for_each(|&e| load[e] -= 1);
        count -= 1;
    }
    for c in chosen.iter_mut() {
        if count == inst.t {
            break;
        }
        if !*c {
            *c = true;
            count += 1;
        }
    }
    let final_sets: Vec<usize> = (0..n).filter(|&s| chosen[s]).collect();
    RoundingOutcome {
        congestion_final: congestion_of_sets(inst, &final_sets),
        selection: SetSelection::new(final_sets),
        drawn,
        congestion_drawn,
        repaired: true,
    }
}
