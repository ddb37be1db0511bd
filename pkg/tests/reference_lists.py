from __future__ import annotations

# the 37 products as listed, transcribed into the spec grammar
LISTED = """
K_3^4 K[2,3]xK_3^3 K[3,3]xK_3^3 K_4xK_3^3
K[2,4]xK_3^3 K_4xK[2,3]xK_3^2 K_4^2xK_3^2 K[2,4]xK_4xK_3^2
K_4^2xK[2,3]xK_3 K_4^3xK_3 K_5xK_3^3 K[2,5]xK_3^3
K_5xK[2,3]xK_3^2 K_5xK_4xK_3^2 K_5xK_4^2xK_3 K_5^2xK_3^2
K_6xK_3^3 K_6xK_4xK_3^2 K_6xK_4^2xK_3 K_6xK_5xK_3^2
K_7xK_3^3 K_7xK_4xK_3^2 K_8xK_3^3 K_8xK_4xK_3^2
K_9xK_3^3 K_10xK_3^3 K_3^5 K[2,3]xK_3^4
K_4xK_3^4 K_4^2xK_3^3 K_4^3xK_3^2 K_5xK_3^4
K_5xK_4xK_3^3 K_6xK_3^4 K_7xK_3^4 K_3^6
K_4xK_3^5
""".split()
