import numpy as np

from .exceptions import ConfigError
from .utils import print_inline, width_format


def get_optimizer(optimizer_name, **params):
    """
    Examples
    --------
    >>> get_optimizer('nonlinearcg', max_iter=5).max_iter
    5
    """
    for k, v in globals().items():
        if k.lower() == optimizer_name.lower() and isinstance(v, type) and issubclass(v, BaseOptimizer):
            return v(**params)
    raise ValueError("invalid optimizer name '{0}'".format(optimizer_name))


class OptimizeResult(object):
    """Outcome of `BaseOptimizer.minimize`.

    Attributes
    ----------
    x : np.ndarray
        Final iterate.
    fun : float
        Loss at `x`.
    n_iter : int
        Number of accepted iterations.
    status : str
        'converged', 'max-iter', 'line-search-failed' or 'stalled'.
    losses : list of float
        Loss of the start point followed by the loss of each
        accepted iterate.
    rel_changes : list of float
        Relative loss change of each accepted iterate.
    """
    def __init__(self, x, fun, n_iter, status, losses, rel_changes):
        self.x = x
        self.fun = fun
        self.n_iter = n_iter
        self.status = status
        self.losses = losses
        self.rel_changes = rel_changes

    @property
    def stalled(self):
        return self.status == 'stalled'

    def __repr__(self):
        return "OptimizeResult(fun={0}, n_iter={1}, status='{2}')".format(self.fun, self.n_iter, self.status)


class BaseOptimizer(object):
    """Nonlinear conjugate gradient skeleton with projected
    backtracking line search.

    Each search direction is rescaled to unit max-norm, so steps are
    in units of the parameters (m/s for velocity maps). Trial steps
    start at `initial_step` and are reduced until the Armijo condition
    holds, using the minimizer of the quadratic through the current
    loss, its slope and the trial loss, kept within [0.1, 0.5] of the
    rejected step. The minimizer of the quadratic through the accepted
    point is tried too, and kept if better.

    Parameters
    ----------
    max_iter : int
        Maximum number of accepted iterations.
    tol : float
        Stop when |f_k - f_{k-1}| / f_{k-1} < `tol`.
    bounds : None or (float, float)
        Box every iterate is projected into.
    initial_step : positive float
    max_halvings : int
        Maximum number of step reductions per line search.
    c1 : float
        Armijo constant.
    verbose : bool
    label : str
        Prefix of progress lines.
    """
    def __init__(self, max_iter=20, tol=1e-3, bounds=None, initial_step=50.,
                 max_halvings=10, c1=1e-4, verbose=False, label=''):
        if max_iter < 1:
            raise ConfigError("max_iter must be >= 1, got {0}".format(max_iter))
        if initial_step <= 0:
            raise ConfigError("initial_step must be positive, got {0}".format(initial_step))
        self.max_iter = max_iter
        self.tol = tol
        self.bounds = bounds
        self.initial_step = initial_step
        self.max_halvings = max_halvings
        self.c1 = c1
        self.verbose = verbose
        self.label = label

    def _beta(self, g_new, g_old, d_old):
        raise NotImplementedError()

    def project(self, x):
        if self.bounds is None:
            return x
        return np.clip(x, self.bounds[0], self.bounds[1])

    def _line_search(self, loss_fun, x, f, g, d):
        """Return (x_new, f_new) or None if no acceptable step was found."""
        alpha = self.initial_step
        for _ in range(self.max_halvings + 1):
            x_trial = self.project(x + alpha * d)
            step = x_trial - x
            slope = float(np.dot(g, step))
            if slope >= 0.:
                alpha *= 0.5
                continue
            f_trial = loss_fun(x_trial)
            if f_trial <= f + self.c1 * slope:
                return self._refine(loss_fun, x, f, slope, x_trial, f_trial, step)
            curvature = 2. * (f_trial - f - slope)
            alpha_q = -slope * alpha / curvature if curvature > 0. else 0.5 * alpha
            alpha = min(max(alpha_q, 0.1 * alpha), 0.5 * alpha)
        return None

    def _refine(self, loss_fun, x, f, slope, x_trial, f_trial, step):
        curvature = 2. * (f_trial - f - slope)
        if curvature <= 0.:
            return x_trial, f_trial
        t = min(-slope / curvature, 4.)
        if np.isclose(t, 1.):
            return x_trial, f_trial
        x_q = self.project(x + t * step)
        f_q = loss_fun(x_q)
        if f_q < f_trial:
            return x_q, f_q
        return x_trial, f_trial

    def _report(self, it, f, rel):
        if self.verbose:
            print_inline("{0}iter {1:>3}/{2}  loss: {3}  rel. change: {4}\n".format(
                self.label, it, self.max_iter, width_format(f, default_width=10, max_precision=6),
                width_format(rel, default_width=8, max_precision=5)))

    def minimize(self, fun, x0, loss_fun=None, callback=None):
        """Minimize `fun` starting from `x0`.

        Parameters
        ----------
        fun : callable x -> (loss, gradient)
        x0 : np.ndarray
        loss_fun : None or callable x -> loss, optional
            Cheaper loss-only evaluation for line-search trials.
        callback : None or callable (iteration, loss, rel_change, status), optional
            Called for the start point and every accepted iterate.

        Returns
        -------
        result : OptimizeResult
        """
        if loss_fun is None:
            loss_fun = lambda x: fun(x)[0]
        x0 = np.asarray(x0, dtype=np.float64)
        x = self.project(x0)
        f, g = fun(x)
        losses, rel_changes = [f], []
        if callback:
            callback(0, f, np.nan, 'start')

        if f == 0. or not np.any(g):
            if callback:
                callback(0, f, 0., 'converged')
            return OptimizeResult(x, f, 0, 'converged', losses, rel_changes)

        d = -g
        status = 'max-iter'
        it = 0
        while it < self.max_iter:
            if np.dot(g, d) >= 0.:
                d = -g
            d_scaled = d / np.max(np.abs(d))
            found = self._line_search(loss_fun, x, f, g, d_scaled)
            if found is None:
                if it == 0:
                    if callback:
                        callback(0, f, 0., 'stalled')
                    return OptimizeResult(x, f, 0, 'stalled', losses, rel_changes)
                status = 'line-search-failed'
                if callback:
                    callback(it, f, 0., status)
                break
            it += 1
            x_new, _ = found
            f_new, g_new = fun(x_new)
            rel = abs(f - f_new) / f
            losses.append(f_new)
            rel_changes.append(rel)
            beta = self._beta(g_new, g, d)
            d = -g_new + beta * d
            x, f, g = x_new, f_new, g_new
            self._report(it, f, rel)

            if f == 0. or rel < self.tol or not np.any(g):
                status = 'converged'
            elif it == self.max_iter:
                status = 'max-iter'
            if callback:
                callback(it, f, rel, status if status == 'converged' or it == self.max_iter else 'ok')
            if status == 'converged':
                break
        return OptimizeResult(x, f, it, status, losses, rel_changes)


class NonlinearCG(BaseOptimizer):
    """Polak-Ribiere+ conjugate gradient (restarts whenever beta < 0
    or the direction is not a descent one).

    Examples
    --------
    >>> A = np.array([[3., 1.], [1., 2.]])
    >>> x_star = np.array([1., -2.])
    >>> fun = lambda x: (0.5 * (x - x_star).dot(A).dot(x - x_star), A.dot(x - x_star))
    >>> res = NonlinearCG(max_iter=50, tol=1e-14, initial_step=1.).minimize(fun, np.zeros(2))
    >>> bool(np.allclose(res.x, x_star, atol=1e-6))
    True
    """
    def _beta(self, g_new, g_old, d_old):
        return max(0., float(np.dot(g_new, g_new - g_old)) / float(np.dot(g_old, g_old)))


class SteepestDescent(BaseOptimizer):
    def _beta(self, g_new, g_old, d_old):
        return 0.


if __name__ == '__main__':
    # run corresponding tests
    from fwiforge.utils.testing import run_tests
    run_tests(__file__)
