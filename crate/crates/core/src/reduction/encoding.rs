//! Tape as three naturals: the cells left of the head read forwards, the
//! head cell, and the cells right of the head read backwards.

use crate::lbatm::{Symbol, Tape};

use super::ReductionError;

/// Longest tape whose encodings fit in a `u64` with room for one more digit.
pub const MAX_TAPE_LEN: usize = 19;

fn number(digits: impl Iterator<Item = Symbol>) -> u64 {
    digits.fold(0, |acc, s| acc * 10 + s.digit())
}

/// `(muL, mu, muR)` for `tape` with the head on cell `head`.
pub fn encode_tape(tape: &Tape, head: usize) -> Result<(u64, u64, u64), ReductionError> {
    let cells = tape.cells();
    if head >= cells.len() {
        return Err(ReductionError::Encoding(format!("head {head} outside a tape of {} cells", cells.len())));
    }
    if cells.len() > MAX_TAPE_LEN {
        return Err(ReductionError::Encoding(format!("tapes longer than {MAX_TAPE_LEN} cells overflow")));
    }
    let left = number(cells[..head].iter().copied());
    let right = number(cells[head + 1..].iter().rev().copied());
    Ok((left, cells[head].digit(), right))
}

fn digits_of(mut v: u64) -> Vec<u64> {
    let mut d = Vec::new();
    while v > 0 {
        d.push(v % 10);
        v /= 10;
    }
    d.reverse();
    d
}

fn symbol(d: u64) -> Result<Symbol, ReductionError> {
    Symbol::from_digit(d).ok_or_else(|| ReductionError::Encoding(format!("digit {d} is not a symbol")))
}

/// Inverse of [`encode_tape`]. Left and right parts carry no leading
/// blanks in their numbers, so they must start with a delimiter digit or
/// be empty.
pub fn decode_tape(left: u64, mid: u64, right: u64) -> Result<(Tape, usize), ReductionError> {
    let mut cells = Vec::new();
    for d in digits_of(left) {
        cells.push(symbol(d)?);
    }
    let head = cells.len();
    cells.push(symbol(mid)?);
    for d in digits_of(right).into_iter().rev() {
        cells.push(symbol(d)?);
    }
    let tape = Tape::new(cells).map_err(|e| ReductionError::Encoding(e.to_string()))?;
    Ok((tape, head))
}

/// The largest encoding of a tape with `len` cells: `32…24`.
pub fn max_value(len: usize) -> Result<u64, ReductionError> {
    if len < 2 {
        return Err(ReductionError::Encoding(format!("a tape has at least 2 cells, not {len}")));
    }
    if len > MAX_TAPE_LEN {
        return Err(ReductionError::Encoding(format!("tapes longer than {MAX_TAPE_LEN} cells overflow")));
    }
    let text = format!("3{}4", "2".repeat(len - 2));
    Ok(text.parse().expect("fits"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let (t, head) = Tape::parse("[B112(1)1B2BB]").unwrap();
        assert_eq!(encode_tape(&t, head.unwrap()).unwrap(), (30112, 1, 400201));
        assert_eq!(decode_tape(30112, 1, 400201).unwrap(), (t, 5));
    }

    #[test]
    fn head_on_left_delimiter() {
        let t = Tape::from_inner(&[]).unwrap();
        assert_eq!(encode_tape(&t, 0).unwrap(), (0, 3, 4));
    }

    #[test]
    fn max_values() {
        assert_eq!(max_value(2).unwrap(), 34);
        assert_eq!(max_value(4).unwrap(), 3224);
        assert_eq!(max_value(5).unwrap(), 32224);
        assert_eq!(max_value(11).unwrap(), 32222222224);
        assert!(max_value(1).is_err());
        assert!(max_value(20).is_err());
    }

    #[test]
    fn encodings_stay_below_max() {
        for len in 2..=5 {
            for t in Tape::all_of_length(len) {
                let m = max_value(t.len()).unwrap();
                for h in 0..t.len() {
                    let (l, c, r) = encode_tape(&t, h).unwrap();
                    assert!(l <= m && c <= m && r <= m);
                    assert_eq!(decode_tape(l, c, r).unwrap(), (t.clone(), h));
                }
            }
        }
    }
}
