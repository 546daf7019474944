from .base import Game, GameError, GameSpec, exploitability, member_value, mixtures_except
from .deceptive import DeceptiveMessages
from .kuhn import KuhnPoker
from .matrix import MatrixGame
from .public_goods import PublicGoods

__all__ = [
    "Game",
    "GameError",
    "GameSpec",
    "exploitability",
    "member_value",
    "mixtures_except",
    "MatrixGame",
    "KuhnPoker",
    "DeceptiveMessages",
    "PublicGoods",
    "make_game",
]


def make_game(name: str, **params) -> Game:
    """Construct a built-in game from config parameters."""
    import numpy as np

    if name == "rps":
        return MatrixGame.rps()
    if name == "matrix":
        if "payoffs" in params:
            rows, cols = params["shape"]
            payoff = np.asarray(params["payoffs"], dtype=np.float64).reshape(rows, cols)
            return MatrixGame(payoff)
        return MatrixGame.random_zero_sum(params["random_k"], params.get("random_seed", 0))
    if name == "kuhn":
        return KuhnPoker()
    if name == "deceptive":
        return DeceptiveMessages()
    if name == "pgg":
        return PublicGoods(
            n_players=params.get("n_players", 5),
            multiplier=params.get("multiplier", 1.6),
            cost=params.get("cost", 1.0),
        )
    raise GameError(f"unknown game '{name}'")
