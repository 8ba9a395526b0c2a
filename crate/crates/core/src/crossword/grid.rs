//! Grids, slots, clues and the puzzle text format.
//!
//! ```text
//! GRID
//! #...
//! ....
//! ACROSS
//! 1 First clue
//! DOWN
//! 1 Another clue
//! SOLUTION
//! #CAT
//! ...
//! ```
//!
//! GRID rows use `#` for blocks and `.` for open cells; letters in GRID
//! embed a solution directly. SOLUTION is optional.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::problem::VarId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Across,
    Down,
}

impl Direction {
    pub fn letter(self) -> char {
        match self {
            Direction::Across => 'A',
            Direction::Down => 'D',
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Across => "across",
            Direction::Down => "down",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    Block,
    /// An open cell, with its solution letter when known.
    Open(Option<u8>),
}

impl Cell {
    pub fn is_open(self) -> bool {
        matches!(self, Cell::Open(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub height: usize,
    pub width: usize,
    cells: Vec<Cell>,
}

impl Grid {
    pub fn new(height: usize, width: usize, cells: Vec<Cell>) -> Self {
        assert_eq!(cells.len(), height * width, "grid must be rectangular");
        Grid { height, width, cells }
    }

    pub fn open(height: usize, width: usize) -> Self {
        Grid::new(height, width, vec![Cell::Open(None); height * width])
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, cell: Cell) {
        self.cells[row * self.width + col] = cell;
    }

    pub fn is_open(&self, row: usize, col: usize) -> bool {
        self.cell(row, col).is_open()
    }

    pub fn open_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height)
            .flat_map(move |r| (0..self.width).map(move |c| (r, c)))
            .filter(move |&(r, c)| self.is_open(r, c))
    }

    /// Whether every open cell carries a letter.
    pub fn is_filled(&self) -> bool {
        self.cells.iter().all(|c| !matches!(c, Cell::Open(None)))
    }

    pub fn has_letters(&self) -> bool {
        self.cells.iter().any(|c| matches!(c, Cell::Open(Some(_))))
    }

    /// The block pattern with every letter erased.
    pub fn blank(&self) -> Grid {
        let cells = self
            .cells
            .iter()
            .map(|c| match c {
                Cell::Open(_) => Cell::Open(None),
                Cell::Block => Cell::Block,
            })
            .collect();
        Grid::new(self.height, self.width, cells)
    }

    /// Rows in GRID syntax: `#` for blocks, the letter or `.` otherwise.
    pub fn rows(&self) -> Vec<String> {
        (0..self.height)
            .map(|r| {
                (0..self.width)
                    .map(|c| match self.cell(r, c) {
                        Cell::Block => '#',
                        Cell::Open(None) => '.',
                        Cell::Open(Some(l)) => l as char,
                    })
                    .collect()
            })
            .collect()
    }

    /// Maximal runs of open cells in `direction`, any length.
    pub fn runs(&self, direction: Direction) -> Vec<Vec<(usize, usize)>> {
        let (outer, inner) = match direction {
            Direction::Across => (self.height, self.width),
            Direction::Down => (self.width, self.height),
        };
        let at = |o: usize, i: usize| match direction {
            Direction::Across => (o, i),
            Direction::Down => (i, o),
        };
        let mut out = Vec::new();
        for o in 0..outer {
            let mut run = Vec::new();
            for i in 0..inner {
                let (r, c) = at(o, i);
                if self.is_open(r, c) {
                    run.push((r, c));
                } else if !run.is_empty() {
                    out.push(std::mem::take(&mut run));
                }
            }
            if !run.is_empty() {
                out.push(run);
            }
        }
        out
    }
}

/// A numbered word slot; its index in [`Puzzle::slots`] is its variable id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Slot {
    pub id: VarId,
    pub number: u32,
    pub direction: Direction,
    pub cells: Vec<(usize, usize)>,
}

impl Slot {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Display label such as `17A`.
    pub fn label(&self) -> String {
        format!("{}{}", self.number, self.direction.letter())
    }

    pub fn start(&self) -> (usize, usize) {
        self.cells[0]
    }
}

/// Slots of `grid`: maximal runs of two or more open cells, numbered in
/// reading order. Across slots come first, then down, each by number.
pub fn extract_slots(grid: &Grid) -> Vec<Slot> {
    let across: Vec<_> = grid
        .runs(Direction::Across)
        .into_iter()
        .filter(|r| r.len() >= 2)
        .collect();
    let down: Vec<_> = grid
        .runs(Direction::Down)
        .into_iter()
        .filter(|r| r.len() >= 2)
        .collect();
    let mut starts: Vec<(usize, usize)> = across.iter().chain(&down).map(|r| r[0]).collect();
    starts.sort_unstable();
    starts.dedup();
    let number: BTreeMap<(usize, usize), u32> = starts
        .into_iter()
        .enumerate()
        .map(|(i, cell)| (cell, i as u32 + 1))
        .collect();
    let mut slots = Vec::new();
    for (direction, runs) in [(Direction::Across, across), (Direction::Down, down)] {
        for cells in runs {
            slots.push(Slot {
                id: slots.len(),
                number: number[&cells[0]],
                direction,
                cells,
            });
        }
    }
    slots
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clue {
    pub slot: VarId,
    pub text: String,
    pub normalized: String,
}

/// Lowercase, punctuation stripped, whitespace collapsed.
pub fn normalize_clue(text: &str) -> String {
    text.chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Puzzle {
    /// The grid, with solution letters when the file supplied them.
    pub grid: Grid,
    pub slots: Vec<Slot>,
    /// One clue per slot, indexed by slot id.
    pub clues: Vec<Clue>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Grid,
    Across,
    Down,
    Solution,
}

fn parse_row(line: usize, text: &str, letters_only: bool) -> Result<Vec<Cell>, ParseError> {
    text.chars()
        .map(|ch| match ch {
            '#' => Ok(Cell::Block),
            '.' if !letters_only => Ok(Cell::Open(None)),
            c if c.is_ascii_alphabetic() => Ok(Cell::Open(Some(c.to_ascii_uppercase() as u8))),
            c => Err(err(line, format!("unknown cell glyph `{c}`"))),
        })
        .collect()
}

fn rows_to_grid(rows: &[(usize, Vec<Cell>)], what: &str) -> Result<Grid, ParseError> {
    let Some((first_line, first)) = rows.first() else {
        return Err(err(0, format!("{what} section is empty")));
    };
    let width = first.len();
    if width == 0 {
        return Err(err(*first_line, format!("{what} row is empty")));
    }
    for (line, row) in rows {
        if row.len() != width {
            return Err(err(*line, format!("ragged row: {} cells, expected {width}", row.len())));
        }
    }
    let cells = rows.iter().flat_map(|(_, r)| r.iter().copied()).collect();
    Ok(Grid::new(rows.len(), width, cells))
}

/// A bare letter grid, as used for answer keys.
pub fn parse_letter_grid(text: &str) -> Result<Grid, ParseError> {
    let rows = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_row(i + 1, l.trim(), true).map(|r| (i + 1, r)))
        .collect::<Result<Vec<_>, _>>()?;
    rows_to_grid(&rows, "key")
}

pub fn parse_puzzle(text: &str) -> Result<Puzzle, ParseError> {
    let mut section = Section::None;
    let mut grid_rows = Vec::new();
    let mut solution_rows = Vec::new();
    let mut clue_lines: Vec<(usize, Direction, u32, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        match trimmed {
            "GRID" => section = Section::Grid,
            "ACROSS" => section = Section::Across,
            "DOWN" => section = Section::Down,
            "SOLUTION" => section = Section::Solution,
            _ => match section {
                Section::None => return Err(err(line, "expected a GRID header")),
                Section::Grid => grid_rows.push((line, parse_row(line, trimmed, false)?)),
                Section::Solution => solution_rows.push((line, parse_row(line, trimmed, true)?)),
                Section::Across | Section::Down => {
                    let direction = if section == Section::Across {
                        Direction::Across
                    } else {
                        Direction::Down
                    };
                    let (num, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
                    let number: u32 = num
                        .trim_end_matches('.')
                        .parse()
                        .map_err(|_| err(line, format!("bad clue number `{num}`")))?;
                    clue_lines.push((line, direction, number, rest.trim().to_string()));
                }
            },
        }
    }
    let mut grid = rows_to_grid(&grid_rows, "GRID")?;
    if !solution_rows.is_empty() {
        let solution = rows_to_grid(&solution_rows, "SOLUTION")?;
        if (solution.height, solution.width) != (grid.height, grid.width) {
            return Err(err(solution_rows[0].0, "SOLUTION size differs from GRID"));
        }
        for (r, &(line, _)) in solution_rows.iter().enumerate() {
            for c in 0..grid.width {
                match (grid.cell(r, c), solution.cell(r, c)) {
                    (Cell::Block, Cell::Block) => {}
                    (Cell::Open(_), Cell::Open(l)) => grid.set(r, c, Cell::Open(l)),
                    _ => {
                        return Err(err(
                            line,
                            format!("SOLUTION blocks differ from GRID at column {}", c + 1),
                        ))
                    }
                }
            }
        }
    }
    if grid.has_letters() && !grid.is_filled() {
        return Err(err(grid_rows[0].0, "solution letters must fill every open cell"));
    }

    let slots = extract_slots(&grid);
    let mut texts: Vec<Option<String>> = vec![None; slots.len()];
    for (line, direction, number, text) in clue_lines {
        let Some(slot) = slots.iter().find(|s| s.number == number && s.direction == direction) else {
            return Err(err(line, format!("no {direction} slot numbered {number}")));
        };
        if texts[slot.id].replace(text).is_some() {
            return Err(err(line, format!("duplicate clue for {}", slot.label())));
        }
    }
    let mut clues = Vec::with_capacity(slots.len());
    for (slot, text) in slots.iter().zip(texts) {
        let Some(text) = text else {
            return Err(err(0, format!("missing clue for {}", slot.label())));
        };
        clues.push(Clue {
            slot: slot.id,
            normalized: normalize_clue(&text),
            text,
        });
    }
    Ok(Puzzle { grid, slots, clues })
}

impl Puzzle {
    pub fn has_solution(&self) -> bool {
        self.grid.is_filled() && self.grid.has_letters()
    }

    /// The answer of each slot read off the solution grid.
    pub fn answers(&self) -> Option<Vec<String>> {
        self.has_solution().then(|| read_slots(&self.grid, &self.slots))
    }

    /// Puzzle file text; a solution, if present, goes in a SOLUTION section.
    pub fn to_text(&self) -> String {
        let mut out = String::from("GRID\n");
        for row in self.grid.blank().rows() {
            out.push_str(&row);
            out.push('\n');
        }
        for direction in [Direction::Across, Direction::Down] {
            out.push_str(if direction == Direction::Across {
                "ACROSS\n"
            } else {
                "DOWN\n"
            });
            for slot in self.slots.iter().filter(|s| s.direction == direction) {
                out.push_str(&format!("{} {}\n", slot.number, self.clues[slot.id].text));
            }
        }
        if self.has_solution() {
            out.push_str("SOLUTION\n");
            for row in self.grid.rows() {
                out.push_str(&row);
                out.push('\n');
            }
        }
        out
    }
}

/// Letters of each slot in `grid`; unknown letters read as `.`.
pub fn read_slots(grid: &Grid, slots: &[Slot]) -> Vec<String> {
    slots
        .iter()
        .map(|s| {
            s.cells
                .iter()
                .map(|&(r, c)| match grid.cell(r, c) {
                    Cell::Open(Some(l)) => l as char,
                    _ => '.',
                })
                .collect()
        })
        .collect()
}

/// Structural problems found by [`validate_puzzle`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A maximal run of open cells shorter than three.
    ShortRun {
        direction: Direction,
        row: usize,
        col: usize,
        length: usize,
    },
    /// The open cells fall into more than one connected region.
    Disconnected { regions: usize },
    /// The block pattern is not preserved by a half-turn rotation.
    Asymmetric { row: usize, col: usize },
    /// An open cell lies in fewer than two slots.
    Uncovered { row: usize, col: usize, slots: usize },
}

impl Violation {
    /// Asymmetry is tolerated; everything else blocks compilation.
    pub fn is_error(&self) -> bool {
        !matches!(self, Violation::Asymmetric { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ShortRun {
                direction,
                row,
                col,
                length,
            } => write!(
                f,
                "{direction} run of length {length} at row {}, column {}",
                row + 1,
                col + 1
            ),
            Violation::Disconnected { regions } => {
                write!(f, "open cells form {regions} disconnected regions")
            }
            Violation::Asymmetric { row, col } => write!(
                f,
                "block pattern not symmetric under rotation at row {}, column {}",
                row + 1,
                col + 1
            ),
            Violation::Uncovered { row, col, slots } => {
                write!(f, "cell at row {}, column {} lies in {slots} slot(s)", row + 1, col + 1)
            }
        }
    }
}

pub fn validate_puzzle(grid: &Grid, slots: &[Slot]) -> Vec<Violation> {
    let mut out = Vec::new();
    for direction in [Direction::Across, Direction::Down] {
        for run in grid.runs(direction) {
            if run.len() < 3 {
                out.push(Violation::ShortRun {
                    direction,
                    row: run[0].0,
                    col: run[0].1,
                    length: run.len(),
                });
            }
        }
    }

    let regions = open_regions(grid);
    if regions > 1 {
        out.push(Violation::Disconnected { regions });
    }

    for r in 0..grid.height {
        for c in 0..grid.width {
            let (rr, rc) = (grid.height - 1 - r, grid.width - 1 - c);
            if (r, c) <= (rr, rc) && grid.is_open(r, c) != grid.is_open(rr, rc) {
                out.push(Violation::Asymmetric { row: r, col: c });
            }
        }
    }

    let mut cover = vec![0usize; grid.height * grid.width];
    for slot in slots {
        for &(r, c) in &slot.cells {
            cover[r * grid.width + c] += 1;
        }
    }
    for (r, c) in grid.open_cells() {
        let n = cover[r * grid.width + c];
        if n < 2 {
            out.push(Violation::Uncovered {
                row: r,
                col: c,
                slots: n,
            });
        }
    }
    out
}

fn open_regions(grid: &Grid) -> usize {
    let mut seen = vec![false; grid.height * grid.width];
    let mut regions = 0;
    for (r, c) in grid.open_cells() {
        if seen[r * grid.width + c] {
            continue;
        }
        regions += 1;
        let mut queue = VecDeque::from([(r, c)]);
        seen[r * grid.width + c] = true;
        while let Some((r, c)) = queue.pop_front() {
            let mut next = Vec::with_capacity(4);
            if r > 0 {
                next.push((r - 1, c));
            }
            if c > 0 {
                next.push((r, c - 1));
            }
            if r + 1 < grid.height {
                next.push((r + 1, c));
            }
            if c + 1 < grid.width {
                next.push((r, c + 1));
            }
            for (nr, nc) in next {
                if grid.is_open(nr, nc) && !seen[nr * grid.width + nc] {
                    seen[nr * grid.width + nc] = true;
                    queue.push_back((nr, nc));
                }
            }
        }
    }
    regions
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPEN3: &str = "GRID\n...\n...\n...\nACROSS\n1 a\n4 b\n5 c\nDOWN\n1 d\n2 e\n3 f\n";

    #[test]
    fn open_three_by_three() {
        let p = parse_puzzle(OPEN3).unwrap();
        assert_eq!(p.slots.len(), 6);
        let across: Vec<u32> = p
            .slots
            .iter()
            .filter(|s| s.direction == Direction::Across)
            .map(|s| s.number)
            .collect();
        assert_eq!(across, [1, 4, 5]);
        let down: Vec<u32> = p
            .slots
            .iter()
            .filter(|s| s.direction == Direction::Down)
            .map(|s| s.number)
            .collect();
        assert_eq!(down, [1, 2, 3]);
        assert!(validate_puzzle(&p.grid, &p.slots).is_empty());
    }

    #[test]
    fn corner_block_leaves_short_slot() {
        let text = "GRID\n#..\n...\n...\nACROSS\n1 a\n3 b\n4 c\nDOWN\n1 d\n2 e\n3 f\n";
        let p = parse_puzzle(text).unwrap();
        let first = &p.slots[0];
        assert_eq!((first.number, first.len()), (1, 2));
        let v = validate_puzzle(&p.grid, &p.slots);
        assert!(v.iter().any(|x| matches!(x, Violation::ShortRun { length: 2, .. })));
    }

    #[test]
    fn center_block() {
        let grid = parse_puzzle("GRID\n...\n.#.\n...\nACROSS\n1 a\n3 b\nDOWN\n1 c\n2 d\n")
            .unwrap()
            .grid;
        let slots = extract_slots(&grid);
        let v = validate_puzzle(&grid, &slots);
        let short: Vec<_> = v
            .iter()
            .filter(|x| matches!(x, Violation::ShortRun { length: 1, .. }))
            .collect();
        assert_eq!(short.len(), 4);
        let uncovered = v.iter().filter(|x| matches!(x, Violation::Uncovered { .. })).count();
        assert_eq!(uncovered, 4);
    }

    #[test]
    fn asymmetry_is_a_warning() {
        let mut grid = Grid::open(5, 5);
        grid.set(0, 0, Cell::Block);
        let v = validate_puzzle(&grid, &extract_slots(&grid));
        let asym: Vec<_> = v.iter().filter(|x| !x.is_error()).collect();
        assert_eq!(asym, [&Violation::Asymmetric { row: 0, col: 0 }]);
    }

    #[test]
    fn disconnected_grid() {
        let mut grid = Grid::open(3, 7);
        for r in 0..3 {
            grid.set(r, 3, Cell::Block);
        }
        let v = validate_puzzle(&grid, &extract_slots(&grid));
        assert!(v.contains(&Violation::Disconnected { regions: 2 }));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = parse_puzzle("GRID\n...\n..\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_puzzle("GRID\n..x?\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_puzzle("GRID\n...\n...\n...\nACROSS\n9 nope\n").unwrap_err();
        assert_eq!(e.line, 6);
        let e = parse_puzzle("GRID\n...\n...\n...\nACROSS\n1 a\n").unwrap_err();
        assert!(e.message.contains("missing clue"));
    }

    #[test]
    fn round_trip_with_solution() {
        let text = "GRID\nCAT\nAGE\nTEN\nACROSS\n1 Pet\n4 Era\n5 Ten\nDOWN\n1 Pet again\n2 Era again\n3 Number\n";
        let p = parse_puzzle(text).unwrap();
        assert_eq!(p.answers().unwrap(), ["CAT", "AGE", "TEN", "CAT", "AGE", "TEN"]);
        let again = parse_puzzle(&p.to_text()).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn clue_normalization() {
        assert_eq!(normalize_clue("  Pet's  Name, e.g.! "), "pets name eg");
    }
}
