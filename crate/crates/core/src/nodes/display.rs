use std::fmt;

pub const DISPLAY_ROWS: usize = 2;
pub const DISPLAY_COLS: usize = 16;

/// Text buffer standing in for a 16x2 character LCD.
///
/// Rows are always exactly 16 printable ASCII characters; shorter text is
/// space-padded, longer text truncated, and anything unprintable shown as `?`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Display {
    rows: [[u8; DISPLAY_COLS]; DISPLAY_ROWS],
}

impl Default for Display {
    fn default() -> Self {
        Self {
            rows: [[b' '; DISPLAY_COLS]; DISPLAY_ROWS],
        }
    }
}

impl Display {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_row(&mut self, row: usize, text: &str) {
        let mut buf = [b' '; DISPLAY_COLS];
        for (slot, c) in buf.iter_mut().zip(text.chars()) {
            *slot = if c.is_ascii_graphic() || c == ' ' {
                c as u8
            } else {
                b'?'
            };
        }
        self.rows[row] = buf;
    }

    pub fn clear(&mut self) {
        *self = Self::default();
    }

    pub fn row(&self, row: usize) -> &str {
        std::str::from_utf8(&self.rows[row]).expect("rows hold ASCII only")
    }

    pub fn rows(&self) -> [&str; DISPLAY_ROWS] {
        [self.row(0), self.row(1)]
    }

    pub fn contains(&self, needle: &str) -> bool {
        self.rows().iter().any(|r| r.contains(needle))
    }
}

impl fmt::Display for Display {
    /// Boxed rendering, e.g. for terminal output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "+{}+", "-".repeat(DISPLAY_COLS))?;
        for row in self.rows() {
            writeln!(f, "|{row}|")?;
        }
        write!(f, "+{}+", "-".repeat(DISPLAY_COLS))
    }
}
