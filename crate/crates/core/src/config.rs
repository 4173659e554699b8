//! Engine limits, read from the environment by the CLI.

/// Limits shared by closure and enumeration routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    /// Longest word explored when closing a presentation.
    pub max_word_len: usize,
    /// Largest enumeration allowed before failing with `HomSetTooLarge`.
    pub max_hom_card: usize,
    /// Worker threads for parallel suites; 0 means the rayon default.
    pub threads: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { max_word_len: 12, max_hom_card: 10_000, threads: 0 }
    }
}

impl Config {
    /// `DBLINST_MAX_WORDLEN`, `DBLINST_MAX_HOM_CARD` and `DBLINST_THREADS`
    /// override the defaults when they parse as positive integers.
    pub fn from_env() -> Self {
        let mut c = Config::default();
        let read = |k: &str| std::env::var(k).ok().and_then(|v| v.trim().parse::<usize>().ok());
        if let Some(v) = read("DBLINST_MAX_WORDLEN").filter(|&v| v > 0) {
            c.max_word_len = v;
        }
        if let Some(v) = read("DBLINST_MAX_HOM_CARD").filter(|&v| v > 0) {
            c.max_hom_card = v;
        }
        if let Some(v) = read("DBLINST_THREADS") {
            c.threads = v;
        }
        c
    }
}
