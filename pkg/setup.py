from setuptools import setup, find_packages

setup(name='twistmean',
      version='0.1',
      description='Twisted spherical means on annuli of C^n',
      license='MIT',
      classifiers=[
          'Development Status :: 3 - Alpha',
          'Intended Audience :: Science/Research',
          'Topic :: Scientific/Engineering :: Mathematics',
          'License :: OSI Approved :: MIT License',
          'Programming Language :: Python :: 3',
          'Programming Language :: Python :: 3.8',
          'Programming Language :: Python :: 3.9'
      ],
      packages=find_packages(),
      install_requires=['numpy', 'scipy', 'sympy'],
      extras_require={'tests': ['pytest', 'hypothesis', 'pylint']},
      entry_points={
          'console_scripts': ['twistmean=twistmean.cli:main']
      },
      keywords='twisted convolution spherical means heisenberg',
      zip_safe=False)
