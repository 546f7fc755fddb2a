//! Random play sessions for replay and property tests.

#![allow(dead_code)]

use foodcal_core::rng::SplitMix64;
use foodcal_core::scoring::MealPicks;
use foodcal_core::{Gender, Level, MealSlot, Pick, SelectionConstraints, Submission};

/// Random picks for one window; legal unless `break_it` is set.
pub fn window_picks(ids: &[String], c: &SelectionConstraints, rng: &mut SplitMix64, break_it: bool) -> Vec<Pick> {
    let span = (c.max_items_per_window - c.min_items_per_window + 1) as u64;
    let count = c.min_items_per_window as usize + rng.below(span) as usize;
    let mut order: Vec<usize> = (0..ids.len()).collect();
    for i in 0..count {
        let j = i + rng.below((order.len() - i) as u64) as usize;
        order.swap(i, j);
    }
    let mut picks: Vec<Pick> = order[..count]
        .iter()
        .map(|&i| Pick::new(ids[i].clone(), 1 + rng.below(c.max_quantity_per_item as u64) as u32))
        .collect();
    if break_it {
        match rng.below(3) {
            0 => picks[0].quantity = c.max_quantity_per_item + 1,
            1 => picks[0].item_id = "not_on_the_menu".into(),
            _ => picks.clear(),
        }
    }
    picks
}

/// A submission for `level`, legal unless `illegal` is set.
pub fn submission(level: &Level, c: &SelectionConstraints, rng: &mut SplitMix64, illegal: bool) -> Submission {
    let broken = if illegal { rng.below(6) as usize } else { usize::MAX };
    let mut sides = Vec::new();
    for (g, gender) in Gender::ALL.into_iter().enumerate() {
        let mut picks = MealPicks::default();
        for (m, meal) in MealSlot::ALL.into_iter().enumerate() {
            let ids = &level.window(gender, meal).item_ids;
            *picks.get_mut(meal) = window_picks(ids, c, rng, broken == g * 3 + m);
        }
        sides.push(picks);
    }
    let female = sides.pop().unwrap();
    let male = sides.pop().unwrap();
    Submission {
        level_number: level.level_number,
        male,
        female,
    }
}

/// A recorded session: `n` submissions over the given levels, about one in
/// eight illegal.
pub fn session(levels: &[Level], c: &SelectionConstraints, seed: u64, n: usize) -> Vec<Submission> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| {
            let level = &levels[rng.below(levels.len() as u64) as usize];
            let illegal = rng.below(8) == 0;
            submission(level, c, &mut rng, illegal)
        })
        .collect()
}

pub mod durability {
    //! A child process writes through a file store and acknowledges each
    //! write on stdout; the parent kills it and reopens the store.

    use std::io::{BufRead, BufReader, Write};
    use std::path::Path;
    use std::process::{Command, Stdio};

    use foodcal_core::store::{update_profile, FileStore, PlayerToken, ProfileStore};

    pub const DIR_ENV: &str = "FOODCAL_CHILD_DIR";

    /// Body of the child: bumps one attempt counter per write, forever.
    pub fn child_writer() {
        let Ok(dir) = std::env::var(DIR_ENV) else {
            return;
        };
        let store = FileStore::open(&dir).unwrap();
        let token = store.create_anonymous_player().unwrap();
        let mut out = std::io::stdout().lock();
        writeln!(out, "TOKEN {}", token.as_str()).unwrap();
        loop {
            let (_, stored) = update_profile(&store, &token, 0, |p| {
                let mut next = p.clone();
                let level = 1 + (p.attempt_counts.values().sum::<u32>() % 5);
                next.levels_tried.insert(level);
                *next.attempt_counts.entry(level).or_insert(0) += 1;
                Ok::<_, ()>(((), next))
            })
            .unwrap()
            .unwrap();
            writeln!(out, "ACK {}", stored.version).unwrap();
            out.flush().unwrap();
        }
    }

    pub struct Outcome {
        pub last_ack: u64,
        pub reopened_version: u64,
        pub total_attempts: u64,
    }

    /// Runs `test_name` of the current test binary as the child, kills it
    /// after `acks` acknowledged writes, and reopens the store.
    pub fn kill_and_reopen(dir: &Path, test_name: &str, acks: u64) -> Outcome {
        let exe = std::env::current_exe().unwrap();
        let mut child = Command::new(exe)
            .args(["--ignored", "--exact", test_name, "--nocapture", "--test-threads=1"])
            .env(DIR_ENV, dir)
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let mut token = None;
        let mut last_ack = 0;
        let lines = BufReader::new(child.stdout.take().unwrap()).lines();
        for line in lines {
            let line = line.unwrap();
            // the harness may print "test name ... " in front of the first line
            if let Some(i) = line.find("TOKEN ") {
                token = PlayerToken::parse(&line[i + 6..]);
            } else if let Some(v) = line.strip_prefix("ACK ") {
                last_ack = v.parse().unwrap();
                if last_ack >= acks {
                    break;
                }
            }
        }
        child.kill().unwrap();
        child.wait().unwrap();

        let store = FileStore::open(dir).unwrap();
        let stored = store.get_profile(&token.expect("child issued a token")).unwrap();
        Outcome {
            last_ack,
            reopened_version: stored.version,
            total_attempts: stored.profile.attempt_counts.values().map(|&a| a as u64).sum(),
        }
    }
}
