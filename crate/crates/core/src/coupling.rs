//! Maximal coupling between two distributions over the same positions.
//!
//! A position distributed as `old` is turned into one distributed as `new`,
//! moving with probability equal to the total variation distance
//! `0.5 * |new - old|_1`.

use rand::Rng;

use crate::error::Error;

pub fn couple<R: Rng + ?Sized>(
    old: &[f64],
    new: &[f64],
    position: usize,
    rng: &mut R,
) -> Result<usize, Error> {
    if old.len() != new.len() {
        return Err(Error::LengthMismatch { expected: old.len(), found: new.len() });
    }
    if position >= old.len() {
        return Err(Error::EdgeOutOfRange { edge: position, limit: old.len() });
    }
    let here = old[position];
    if here > 0.0 {
        let stay = new[position].min(here) / here;
        if stay >= 1.0 || rng.random::<f64>() < stay {
            return Ok(position);
        }
    }
    let surplus: f64 = old.iter().zip(new).map(|(o, n)| (n - o).max(0.0)).sum();
    if surplus <= 0.0 {
        return Ok(position);
    }
    let mut target = rng.random::<f64>() * surplus;
    let mut last = position;
    for (i, (o, n)) in old.iter().zip(new).enumerate() {
        let gain = (n - o).max(0.0);
        if gain > 0.0 {
            last = i;
            if target < gain {
                return Ok(i);
            }
            target -= gain;
        }
    }
    Ok(last)
}
