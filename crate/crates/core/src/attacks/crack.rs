//! Dictionary attack against a captured handshake.
//!
//! Each candidate costs one PBKDF2 run (4096 HMAC-SHA1 rounds), so the work
//! is embarrassingly parallel. With the `parallel` feature the search fans out
//! over rayon's pool but still reports the first match in list order, so both
//! paths return identical outcomes apart from timing.

use std::time::{Duration, Instant};

use super::handshake::{verify_candidate, HandshakeCapture};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrackOutcome {
    pub found: Option<String>,
    /// Position of the match (1-based) or the whole list length.
    pub candidates_tried: usize,
    pub elapsed: Duration,
}

fn outcome(wordlist: &[String], hit: Option<usize>, started: Instant) -> CrackOutcome {
    CrackOutcome {
        found: hit.map(|i| wordlist[i].clone()),
        candidates_tried: hit.map_or(wordlist.len(), |i| i + 1),
        elapsed: started.elapsed(),
    }
}

pub fn crack_dictionary_sequential(hs: &HandshakeCapture, wordlist: &[String]) -> CrackOutcome {
    let started = Instant::now();
    let hit = wordlist.iter().position(|w| verify_candidate(hs, w).is_verified());
    outcome(wordlist, hit, started)
}

#[cfg(feature = "parallel")]
pub fn crack_dictionary_parallel(hs: &HandshakeCapture, wordlist: &[String]) -> CrackOutcome {
    use rayon::prelude::*;
    let started = Instant::now();
    let hit = wordlist.par_iter().position_first(|w| verify_candidate(hs, w).is_verified());
    outcome(wordlist, hit, started)
}

/// Uses the parallel search when the crate is built with it.
pub fn crack_dictionary(hs: &HandshakeCapture, wordlist: &[String]) -> CrackOutcome {
    #[cfg(feature = "parallel")]
    {
        crack_dictionary_parallel(hs, wordlist)
    }
    #[cfg(not(feature = "parallel"))]
    {
        crack_dictionary_sequential(hs, wordlist)
    }
}

/// One candidate per line; blank lines and trailing `\r` are dropped.
pub fn parse_wordlist(text: &str) -> Vec<String> {
    text.lines().map(|l| l.trim_end_matches('\r')).filter(|l| !l.is_empty()).map(str::to_string).collect()
}
