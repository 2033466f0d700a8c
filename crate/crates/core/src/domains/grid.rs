//! Grid families: doors, localize, wumpus. Cell `cX-Y` has column X and row
//! Y, both 1-based; row 1 is the bottom.

use std::fmt::Write;

fn cell(x: u32, y: u32) -> String {
    format!("c{x}-{y}")
}

fn cells(n: u32) -> impl Iterator<Item = (u32, u32)> {
    (1..=n).flat_map(move |x| (1..=n).map(move |y| (x, y)))
}

fn neighbors(n: u32, x: u32, y: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(4);
    if x > 1 {
        out.push((x - 1, y));
    }
    if x < n {
        out.push((x + 1, y));
    }
    if y > 1 {
        out.push((x, y - 1));
    }
    if y < n {
        out.push((x, y + 1));
    }
    out
}

fn constants(n: u32) -> String {
    let names: Vec<String> = cells(n).map(|(x, y)| cell(x, y)).collect();
    format!("{} - cell", names.join(" "))
}

fn adjacency(n: u32, out: &mut String) {
    for (x, y) in cells(n) {
        for (a, b) in neighbors(n, x, y) {
            let _ = writeln!(out, "    (adj {} {})", cell(x, y), cell(a, b));
        }
    }
}

/// Walls on even columns left of the last one, each with exactly one open
/// door cell (uniform). The agent walks from the bottom-left corner to the
/// top-right one; doors can be sensed or forced open from a horizontally
/// adjacent cell.
pub(super) fn doors(name: &str, n: u32, open_prob: f64) -> (String, String) {
    let domain = format!(
        "(define (domain doors)
  (:types cell)
  (:predicates (at ?c - cell) (adj ?a ?b - cell) (hadj ?a ?b - cell)
               (free ?c - cell) (wall ?c - cell) (open ?c - cell))
  (:action move
    :parameters (?from ?to - cell)
    :precondition (and (at ?from) (adj ?from ?to) (free ?to))
    :effect (and (not (at ?from)) (at ?to)))
  (:action pass
    :parameters (?from ?to - cell)
    :precondition (and (at ?from) (adj ?from ?to) (wall ?to) (open ?to))
    :effect (and (not (at ?from)) (at ?to)))
  (:action sense-door
    :parameters (?from ?door - cell)
    :precondition (and (at ?from) (hadj ?from ?door) (wall ?door))
    :observe (open ?door))
  (:action open-door
    :parameters (?from ?door - cell)
    :precondition (and (at ?from) (hadj ?from ?door) (wall ?door))
    :effect (probabilistic {open_prob} (and (open ?door)) {fail} (and (at ?from)))))
",
        fail = 1.0 - open_prob
    );
    let is_wall = |x: u32| x % 2 == 0 && x < n;
    let mut init = String::new();
    let _ = writeln!(init, "    (at {})", cell(1, 1));
    adjacency(n, &mut init);
    for (x, y) in cells(n) {
        for (a, b) in neighbors(n, x, y) {
            if b == y {
                let _ = writeln!(init, "    (hadj {} {})", cell(x, y), cell(a, b));
            }
        }
        let kind = if is_wall(x) { "wall" } else { "free" };
        let _ = writeln!(init, "    ({kind} {})", cell(x, y));
    }
    for x in (1..=n).filter(|&x| is_wall(x)) {
        let doors: Vec<String> = (1..=n).map(|y| format!("(open {})", cell(x, y))).collect();
        let _ = writeln!(init, "    (oneof {})", doors.join(" "));
    }
    let problem = format!(
        "(define (problem {name}) (domain doors)
  (:constants {})
  (:init
{init}  )
  (:goal (at {})))
",
        constants(n),
        cell(n, n)
    );
    (domain, problem)
}

/// Unknown start (uniform over every cell but the goal), border walls that
/// can be sensed, and parameterless moves that slip and stay in place on
/// cells with odd `x + y`. Goal: the top-right corner.
pub(super) fn localize(name: &str, n: u32, slip: f64) -> (String, String) {
    let dirs: [(&str, i32, i32); 4] = [("north", 0, 1), ("south", 0, -1), ("east", 1, 0), ("west", -1, 0)];
    let wall_of = |d: &str, x: u32, y: u32| match d {
        "north" => y == n,
        "south" => y == 1,
        "east" => x == n,
        _ => x == 1,
    };
    let mut domain = String::new();
    let _ = writeln!(domain, "(define (domain localize)\n  (:types cell)\n  (:constants {})", constants(n));
    let _ = writeln!(
        domain,
        "  (:predicates (at ?c - cell) (wall-north) (wall-south) (wall-east) (wall-west))"
    );
    for (d, dx, dy) in dirs {
        let _ = writeln!(domain, "  (:action move-{d}\n    :effect (and");
        for (x, y) in cells(n) {
            let (tx, ty) = (x as i32 + dx, y as i32 + dy);
            if tx < 1 || ty < 1 || tx > n as i32 || ty > n as i32 {
                continue;
            }
            let (tx, ty) = (tx as u32, ty as u32);
            let mut moved = format!("(not (at {})) (at {})", cell(x, y), cell(tx, ty));
            for (w, _, _) in dirs {
                let (before, after) = (wall_of(w, x, y), wall_of(w, tx, ty));
                if before != after {
                    if after {
                        let _ = write!(moved, " (wall-{w})");
                    } else {
                        let _ = write!(moved, " (not (wall-{w}))");
                    }
                }
            }
            if (x + y) % 2 == 1 {
                let _ = writeln!(
                    domain,
                    "      (when (at {}) (probabilistic {} (and {moved}) {slip} (and (at {}))))",
                    cell(x, y),
                    1.0 - slip,
                    cell(x, y)
                );
            } else {
                let _ = writeln!(domain, "      (when (at {}) (and {moved}))", cell(x, y));
            }
        }
        let _ = writeln!(domain, "    ))");
    }
    for (d, _, _) in dirs {
        let _ = writeln!(domain, "  (:action sense-{d}\n    :observe (wall-{d}))");
    }
    domain.push_str(")\n");

    let goal = (n, n);
    let starts: Vec<(u32, u32)> = cells(n).filter(|&c| c != goal).collect();
    let k = starts.len();
    let mut init = String::from("    (probabilistic");
    for (x, y) in &starts {
        let _ = write!(init, " 1/{k} (and (at {}))", cell(*x, *y));
    }
    init.push_str(")\n");
    for (d, _, _) in dirs {
        let on: Vec<String> = starts
            .iter()
            .filter(|&&(x, y)| wall_of(d, x, y))
            .map(|&(x, y)| format!("(at {})", cell(x, y)))
            .collect();
        let _ = writeln!(init, "    (or (not (wall-{d})) {})", on.join(" "));
        for c in &on {
            let _ = writeln!(init, "    (or (wall-{d}) (not {c}))");
        }
    }
    let problem = format!(
        "(define (problem {name}) (domain localize)
  (:init
{init}  )
  (:goal (at {})))
",
        cell(goal.0, goal.1)
    );
    (domain, problem)
}

/// Hazard pairs straddle the diagonal: pair k is `(2k+1, 2k)` / `(2k, 2k+1)`
/// with exactly one hazard, a wumpus for odd k and a pit for even k. The
/// hazard sits below the diagonal with probability `bias`. Wumpuses stink
/// and pits breeze on the four neighbors; moves require a safe target.
pub(super) fn wumpus(name: &str, n: u32, bias: f64) -> (String, String) {
    let domain = "(define (domain wumpus)
  (:types cell)
  (:predicates (at ?c - cell) (adj ?a ?b - cell) (wumpus ?c - cell) (pit ?c - cell)
               (stench ?c - cell) (breeze ?c - cell))
  (:action move
    :parameters (?from ?to - cell)
    :precondition (and (at ?from) (adj ?from ?to) (not (wumpus ?to)) (not (pit ?to)))
    :effect (and (not (at ?from)) (at ?to)))
  (:action smell
    :parameters (?c - cell)
    :precondition (at ?c)
    :observe (stench ?c))
  (:action feel
    :parameters (?c - cell)
    :precondition (at ?c)
    :observe (breeze ?c)))
"
    .to_string();

    let mut init = String::new();
    let _ = writeln!(init, "    (at {})", cell(1, 1));
    adjacency(n, &mut init);
    // (hazard kind, candidate cell)
    let mut candidates: Vec<(&str, (u32, u32))> = Vec::new();
    for k in (1..).take_while(|k| 2 * k + 1 <= n) {
        let kind = if k % 2 == 1 { "wumpus" } else { "pit" };
        let below = (2 * k + 1, 2 * k);
        let above = (2 * k, 2 * k + 1);
        let _ = writeln!(
            init,
            "    (probabilistic {bias} (and ({kind} {})) {} (and ({kind} {})))",
            cell(below.0, below.1),
            1.0 - bias,
            cell(above.0, above.1)
        );
        candidates.push((kind, below));
        candidates.push((kind, above));
    }
    for (kind, signal) in [("wumpus", "stench"), ("pit", "breeze")] {
        for (x, y) in cells(n) {
            let sources: Vec<String> = neighbors(n, x, y)
                .into_iter()
                .filter(|c| candidates.contains(&(kind, *c)))
                .map(|(a, b)| format!("({kind} {})", cell(a, b)))
                .collect();
            if sources.is_empty() {
                continue;
            }
            let _ = writeln!(init, "    (or (not ({signal} {})) {})", cell(x, y), sources.join(" "));
            for s in &sources {
                let _ = writeln!(init, "    (or ({signal} {}) (not {s}))", cell(x, y));
            }
        }
    }
    let problem = format!(
        "(define (problem {name}) (domain wumpus)
  (:constants {})
  (:init
{init}  )
  (:goal (at {})))
",
        constants(n),
        cell(n, n)
    );
    (domain, problem)
}
