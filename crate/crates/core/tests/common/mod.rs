#![allow(dead_code)]

use softltl_core::{LassoWord, Letter};

/// Every lasso over `ap` with `|prefix| + |cycle| <= max_span`.
pub fn all_lassos(ap: &[&str], max_span: usize) -> Vec<LassoWord> {
    let k = 1usize << ap.len();
    let letters: Vec<Letter> = (0..k)
        .map(|m| {
            ap.iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, a)| a.to_string())
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for span in 1..=max_span {
        for code in 0..k.pow(span as u32) {
            let word: Vec<Letter> = (0..span).map(|j| letters[code / k.pow(j as u32) % k].clone()).collect();
            for split in 0..span {
                out.push(LassoWord::new(word[..split].to_vec(), word[split..].to_vec()).unwrap());
            }
        }
    }
    out
}
