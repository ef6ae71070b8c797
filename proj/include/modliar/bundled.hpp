#pragma once

#include <string_view>

// Copies of the files under assets/. tests/test_bundled.cpp keeps them in sync.

namespace modliar::bundled {

/// assets/liar.mod
inline constexpr std::string_view kLiarDefinitions = R"asset(# The modal liar: q says of itself that it is not necessary.
def q := ~[]q
)asset";

/// assets/post_footnote3.mod
inline constexpr std::string_view kPostQueries = R"asset(# No definitions. Two validity queries about "p entails its own negation":
#
#   modliar valid --defs post_footnote3.mod --system T --query "(p -> ~p) -> []~p"
#     not valid; a reflexive countermodel is printed
#   modliar valid --defs post_footnote3.mod --system K --query "[]((p -> ~p) -> ~p)"
#     valid
)asset";

/// assets/paper_derivation.prf
inline constexpr std::string_view kLiarDerivation = R"asset(# q iff ~q from the definition q := ~[]q over reflexive frames,
# without necessitation.
system T
use liar.mod

# right to left
1. assume ~q @ w0
2. ~~[]q @ w0 by subeq(1)
3. []q @ w0 by dne(2)
4. q @ w0 by t_axiom(3)
5. ~q -> q @ w0 by cp(1-4)

# left to right; the assumption serves both the conditional and the reductio
6. assume q @ w0
7. ~[]q @ w0 by subeq(6)
8. <>~q @ w0 by dual(7)
9. ~q @ W by dia_e(8)
10. ~~[]q @ W by subeq(9)
11. []q @ W by dne(10)
12. q @ W by t_axiom(11)
13. ~q @ w0 by raa(6-12)
14. q -> ~q @ w0 by cp(6-13)

15. q <-> ~q @ w0 by iff_intro(14, 5)
)asset";

/// assets/liar_via_necessitation.prf
inline constexpr std::string_view kLiarViaNecessitation = R"asset(# Same conclusion, but the left-to-right half first proves q <-> ~[]q,
# necessitates it, and instantiates the boxed definition by t_axiom.
system T
use liar.mod

1. assume q @ w0
2. ~[]q @ w0 by subeq(1)
3. q -> ~[]q @ w0 by cp(1-2)
4. assume ~[]q @ w0
5. q @ w0 by subeq(4)
6. ~[]q -> q @ w0 by cp(4-5)
7. q <-> ~[]q @ w0 by iff_intro(3, 6)
8. [](q <-> ~[]q) @ w0 by nec(7)

9. assume ~q @ w0
10. ~~[]q @ w0 by subeq(9)
11. []q @ w0 by dne(10)
12. q @ w0 by t_axiom(11)
13. ~q -> q @ w0 by cp(9-12)

14. assume q @ w0
15. q <-> ~[]q @ w0 by t_axiom(8)
16. ~[]q @ w0 by mp(15, 14)
17. <>~q @ w0 by dual(16)
18. ~q @ W by dia_e(17)
19. ~~[]q @ W by subeq(18)
20. []q @ W by dne(19)
21. q @ W by t_axiom(20)
22. ~q @ w0 by raa(14-21)
23. q -> ~q @ w0 by cp(14-22)

24. q <-> ~q @ w0 by iff_intro(23, 13)
)asset";

}  // namespace modliar::bundled
