//! Jaro and Jaro-Winkler string similarity.
//!
//! Winkler variant: prefix scale 0.1, at most 4 prefix characters, boost applied
//! when the Jaro similarity is at least 0.7. Two empty strings are identical
//! (similarity 1); an empty string against a non-empty one scores 0.

use crate::Scalar;

pub const PREFIX_SCALE: f64 = 0.1;
pub const MAX_PREFIX: usize = 4;
pub const BOOST_THRESHOLD: f64 = 0.7;

pub fn jaro<T: Scalar>(a: &str, b: &str) -> T {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    jaro_chars(&a, &b)
}

pub fn jaro_winkler<T: Scalar>(a: &str, b: &str) -> T {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    jaro_winkler_chars(&a, &b)
}

pub fn jaro_winkler_chars<T: Scalar>(a: &[char], b: &[char]) -> T {
    let j = jaro_chars::<T>(a, b);
    let prefix = a
        .iter()
        .zip(b)
        .take(MAX_PREFIX)
        .take_while(|(x, y)| x == y)
        .count();
    winkler_adjust(j, prefix)
}

/// Applies the Winkler prefix boost to a Jaro similarity.
pub fn winkler_adjust<T: Scalar>(jaro: T, prefix_len: usize) -> T {
    if jaro < T::lit(BOOST_THRESHOLD) {
        return jaro;
    }
    let l = T::from_count(prefix_len.min(MAX_PREFIX));
    jaro + l * T::lit(PREFIX_SCALE) * (T::one() - jaro)
}

pub fn jaro_chars<T: Scalar>(a: &[char], b: &[char]) -> T {
    if a == b {
        return T::one();
    }
    if a.is_empty() || b.is_empty() {
        return T::zero();
    }
    // Greedy matching depends on argument order; fix it so the measure is
    // exactly symmetric.
    let (s1, s2) = if a <= b { (a, b) } else { (b, a) };
    let (m, t) = matches_and_transpositions(s1, s2);
    if m == 0 {
        return T::zero();
    }
    let m_f = T::from_count(m);
    (m_f / T::from_count(s1.len()) + m_f / T::from_count(s2.len()) + T::from_count(m - t) / m_f)
        / T::lit(3.0)
}

/// Returns the number of matching characters and half the number of
/// out-of-order matches.
fn matches_and_transpositions(s1: &[char], s2: &[char]) -> (usize, usize) {
    let window = (s1.len().max(s2.len()) / 2).saturating_sub(1);
    let mut used2 = vec![false; s2.len()];
    let mut matched1 = Vec::with_capacity(s1.len());
    for (i, &c) in s1.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(s2.len());
        if lo >= hi {
            continue;
        }
        if let Some(j) = (lo..hi).find(|&j| !used2[j] && s2[j] == c) {
            used2[j] = true;
            matched1.push(c);
        }
    }
    let matched2 = s2.iter().zip(&used2).filter(|(_, &u)| u).map(|(&c, _)| c);
    let half_transpositions = matched1
        .iter()
        .zip(matched2)
        .filter(|(x, y)| *x != y)
        .count()
        / 2;
    (matched1.len(), half_transpositions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn martha_marhta() {
        let j: f64 = jaro("martha", "marhta");
        assert!((j - 0.944_444_444).abs() < 1e-6);
        let jw: f64 = jaro_winkler("martha", "marhta");
        assert!((jw - 0.9611).abs() < 1e-4, "{jw}");
        let jw32: f32 = jaro_winkler("martha", "marhta");
        assert!((jw32 - 0.9611).abs() < 1e-4);
    }

    #[test]
    fn identity_disjoint_and_empty() {
        assert_eq!(jaro_winkler::<f64>("colavizza", "colavizza"), 1.0);
        assert_eq!(jaro_winkler::<f64>("abc", "xyz"), 0.0);
        assert_eq!(jaro_winkler::<f64>("", ""), 1.0);
        assert_eq!(jaro_winkler::<f64>("", "a"), 0.0);
        assert_eq!(jaro_winkler::<f64>("a", "b"), 0.0);
    }

    #[test]
    fn classic_reference_values() {
        // Published Jaro-Winkler values for the standard test pairs.
        let cases = [("dwayne", "duane", 0.84), ("dixon", "dicksonx", 0.8133)];
        for (a, b, expected) in cases {
            let jw: f64 = jaro_winkler(a, b);
            assert!((jw - expected).abs() < 1e-4, "{a}/{b}: {jw}");
        }
    }

    #[test]
    fn boost_only_above_threshold() {
        assert_eq!(winkler_adjust(0.69f64, 4), 0.69);
        assert!((winkler_adjust(0.8f64, 2) - 0.84).abs() < 1e-12);
        assert_eq!(winkler_adjust(0.8f64, 9), winkler_adjust(0.8f64, 4));
    }
}
