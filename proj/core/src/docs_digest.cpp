#include "pskit/docs_digest.hpp"

namespace pskit {

namespace {

// Keep the digest stable: prompts embed it verbatim and recorded sessions
// replay against it. Bump the version string on any edit.
constexpr std::string_view kVersion = "puzzlescript-digest-1";

constexpr std::string_view kDigest = R"DOC(PuzzleScript quick reference (supported subset)

A PuzzleScript game is a single text file with a prelude followed by six
sections. Section headers are written between delimiter lines of equals
signs, in this order:

    title My Game
    author Someone

    ========
    OBJECTS
    ========
    ...

    ========
    LEGEND
    ========
    ...

    ========
    SOUNDS
    ========

    ========
    COLLISIONLAYERS
    ========
    ...

    ========
    RULES
    ========
    ...

    ========
    WINCONDITIONS
    ========
    ...

    ========
    LEVELS
    ========
    ...

Comments are written in (parentheses) and may nest; they can appear
anywhere. Keywords and identifiers are case-insensitive.

PRELUDE
Recognized settings: title, author, homepage, background_color, text_color,
run_rules_on_level_start, again_interval, norepeat_action. Color settings
take a color word or #hex value. run_rules_on_level_start makes the rules
run once when a level loads, before any input. Other engine settings
(realtime_interval etc.) are not supported here.

OBJECTS
Each object is a name line, a color line, and an optional 5x5 sprite grid:

    Player
    black orange white blue
    .000.
    .111.
    22222
    .333.
    .3.3.

Colors: 1 to 10 of black, white, grey, darkgrey, lightgrey, gray variants,
red, darkred, lightred, brown, darkbrown, lightbrown, orange, yellow,
green, darkgreen, lightgreen, blue, lightblue, darkblue, purple, pink,
transparent, or #rgb / #rrggbb hex. In the sprite grid each character is a
digit (index into the color line, 0-based) or . for transparent. Omitting
the grid draws a solid block of color 0. An object named Background must
exist; it fills every cell behind everything else.

LEGEND
Maps level glyphs and names to objects:

    . = Background
    # = Wall
    P = Player
    @ = Crate and Target      (aggregate: both occupy the cell)
    Obstacle = Wall or Crate  (property: either one)

Single-character keys can be used in levels. Word keys (properties like
Obstacle) can be used in rules, collision layers, and win conditions.
Aggregates (and-combinations) can be used in levels but not in rules.

SOUNDS
Sound events are accepted and ignored; the section may be left empty.

COLLISIONLAYERS
One line per layer, listing objects or properties separated by commas.
At most one object per layer fits in a cell; objects moving into an
occupied cell of their own layer are blocked. Background goes first
(bottom). Every object must appear in exactly one layer:

    Background
    Target
    Player, Wall, Crate

RULES
Rules rewrite rows or columns of cells. Cells are separated by | inside
brackets; both sides need the same bracket and cell counts:

    [ > Player | Crate ] -> [ > Player | > Crate ]

The > marks motion: "a Player moving into this direction". When a rule has
no direction prefix it is tried in all four directions, and >, <, ^, v are
relative to that direction (> = forward, < = backward, ^ and v =
perpendicular). Prefix keywords restrict directions: up, down, left, right,
horizontal, vertical. Motion words inside cells: moving, stationary,
action, or absolute up/down/left/right. `no X` means "no X here", and an
empty cell slot matches anything (left side) or clears what was matched
(right side). `...` matches a stretch of zero or more cells; it must line
up on both sides:

    [ Player | ... | Target ] -> [ Player | ... | Player ]

`late` rules run after movement has been applied; they may not contain
motion markers. `random` picks one random match per turn. Commands after
the right side: cancel, win, again, checkpoint, restart, message <text>,
sfx0..sfx10 (ignored). `again` reruns the rules after this turn finishes,
as long as something keeps changing.

Unsupported: rigid, startloop/endloop, randomdir, orthogonal,
perpendicular, parallel. Rules must stay on one line.

WINCONDITIONS
Zero or more lines of:

    All X on Y
    Some X          Some X on Y
    No X            No X on Y

All win conditions must hold at the end of a turn for the level to be won.
`All X on Y` is satisfied when every cell holding an X also holds a Y
(true when no X exists). A game with no win conditions never ends.

LEVELS
Levels are rectangles of legend glyphs, separated by blank lines; every
row in a level must have the same length. `message <text>` lines between
levels show text:

    ####.
    #.@P#
    #..##
    ####.

    message Good job!

    #####
    #@.P#
    #####

The player moves with the arrow keys plus an action key; each input runs
the rules, then movement, then late rules, then win checks. Keep levels
small and make sure each one is actually solvable, with a solution that
takes more than a handful of moves.

Minimal complete example:

    title Push
    author example

    ========
    OBJECTS
    ========

    Background
    darkblue

    Wall
    grey

    Player
    orange

    Crate
    yellow

    Target
    red

    ========
    LEGEND
    ========

    . = Background
    # = Wall
    P = Player
    * = Crate
    O = Target
    @ = Crate and Target

    ========
    SOUNDS
    ========

    ========
    COLLISIONLAYERS
    ========

    Background
    Target
    Player, Wall, Crate

    ========
    RULES
    ========

    [ > Player | Crate ] -> [ > Player | > Crate ]

    ========
    WINCONDITIONS
    ========

    All Target on Crate

    ========
    LEVELS
    ========

    ######
    #.P..#
    #.*.O#
    ######
)DOC";

}  // namespace

std::string_view docs_digest() { return kDigest; }
std::string_view docs_digest_version() { return kVersion; }

}  // namespace pskit
