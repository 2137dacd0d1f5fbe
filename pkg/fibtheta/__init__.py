"""fibtheta: certified workbench for Fibonacci infinite products and Jacobi theta values"""

__version__ = "1.0.0"
__app_name__ = "fibtheta"
